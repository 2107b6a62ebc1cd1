"""Numerical Grothendieck lattice of a one-point blowup surface.

Everything downstream works on the blowup ``f: X -> Y`` of a smooth
projective surface ``Y`` at a single point, with exceptional curve ``C``
satisfying ``C.C = -1``.  A class in the numerical lattice of ``X`` is
stored as ``(r, d, e, c2)`` where ``r`` is the rank, ``d`` is the
pullback part of the first Chern character in a fixed basis of ``N^1(Y)``,
``e`` is the coefficient of ``C``, and ``c2`` is the second Chern
character evaluated against the point class.

Intersection rules on ``X``:

* ``f*D . f*D' = D .Y D'`` (via the chosen intersection matrix on ``Y``),
* ``f*D . C = 0``,
* ``C . C = -1``,
* ``K_X = f*K_Y + C``.

Lattice data is kept in exact rational arithmetic (``fractions.Fraction``)
so that group-action and twist identities can be asserted exactly; real
divisor parameters may be floats, in which case results degrade gracefully
to floats.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

Scalar = Union[int, float, Fraction]

_NAME_RE = re.compile(r"^O_C\((-?\d+)\)(?:\[(-?\d+)\])?$")


def as_fraction(x: Scalar) -> Fraction:
    """Coerce ints, Fractions and (dyadic) floats to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not x == x or x in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite scalar {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


def _vec(xs: Sequence[Scalar]) -> tuple:
    return tuple(xs)


@dataclass(frozen=True)
class SurfaceModel:
    """Blowup of a polarized surface ``Y`` at one point.

    Parameters
    ----------
    rho : int
        Picard rank of ``Y``.
    QY : tuple of tuple of Fraction
        Symmetric intersection matrix of the chosen ``N^1(Y)`` basis.
    KY : tuple of Fraction
        Coefficients of the canonical class of ``Y`` in that basis.
    catalog_bound : int
        Largest ``|k|`` for which ``O_C(k)`` enters the default catalog.
    """

    rho: int
    QY: tuple
    KY: tuple
    catalog_bound: int = 10

    def __post_init__(self):
        if self.rho < 1:
            raise ValueError("Picard rank of Y must be at least 1")
        q = tuple(tuple(as_fraction(x) for x in row) for row in self.QY)
        if len(q) != self.rho or any(len(row) != self.rho for row in q):
            raise ValueError("intersection matrix must be rho x rho")
        for i in range(self.rho):
            for j in range(self.rho):
                if q[i][j] != q[j][i]:
                    raise ValueError("intersection matrix must be symmetric")
        k = tuple(as_fraction(x) for x in self.KY)
        if len(k) != self.rho:
            raise ValueError("canonical class must have rho coefficients")
        object.__setattr__(self, "QY", q)
        object.__setattr__(self, "KY", k)

    # -- intersection theory on Y and X -------------------------------------

    def dot_Y(self, a: Sequence[Scalar], b: Sequence[Scalar]):
        """Intersection number of two divisor classes on Y."""
        return sum(
            a[i] * self.QY[i][j] * b[j]
            for i in range(self.rho)
            for j in range(self.rho)
        )

    def ch1_pairing(self, v: "ChernClass", B: "DivisorClass"):
        """Intersection ``ch_1(v) . B`` on X: ``d^T Q_Y b - e * bC``."""
        return self.dot_Y(v.d, B.b) - v.e * B.bC

    def divisor_square(self, B: "DivisorClass"):
        """Self-intersection ``B.B = b^T Q_Y b - bC^2`` on X."""
        return self.dot_Y(B.b, B.b) - B.bC * B.bC

    def divisor_dot(self, A: "DivisorClass", B: "DivisorClass"):
        return self.dot_Y(A.b, B.b) - A.bC * B.bC

    def canonical_X(self) -> "DivisorClass":
        """``K_X = f*K_Y + C``."""
        return DivisorClass(self.KY, Fraction(1))

    def KY_square(self):
        return self.dot_Y(self.KY, self.KY)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "rho": self.rho,
                "QY": [[str(x) for x in row] for row in self.QY],
                "KY": [str(x) for x in self.KY],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "SurfaceModel":
        data = json.loads(text)
        return SurfaceModel(
            rho=int(data["rho"]),
            QY=tuple(tuple(Fraction(x) for x in row) for row in data["QY"]),
            KY=tuple(Fraction(x) for x in data["KY"]),
        )


def make_surface_model(rho: int, QY, KY, catalog_bound: int = 10) -> SurfaceModel:
    """Build a blowup model; raises on non-symmetric ``QY`` or ``rho < 1``."""
    return SurfaceModel(rho=rho, QY=tuple(tuple(r) for r in QY), KY=tuple(KY),
                        catalog_bound=catalog_bound)


def default_model() -> SurfaceModel:
    """P^2 blown up at a point (rho = 1, QY = (1), K_Y = -3H)."""
    return make_surface_model(1, ((1,),), (-3,))


@dataclass(frozen=True)
class ChernClass:
    """Lattice class ``(ch_0, ch_1 = f*d + e C, ch_2)`` on the blowup."""

    r: Scalar
    d: tuple
    e: Scalar
    c2: Scalar

    def __post_init__(self):
        object.__setattr__(self, "d", _vec(self.d))

    @staticmethod
    def zero(rho: int) -> "ChernClass":
        z = Fraction(0)
        return ChernClass(z, (z,) * rho, z, z)

    def __add__(self, other: "ChernClass") -> "ChernClass":
        return ChernClass(
            self.r + other.r,
            tuple(a + b for a, b in zip(self.d, other.d)),
            self.e + other.e,
            self.c2 + other.c2,
        )

    def __sub__(self, other: "ChernClass") -> "ChernClass":
        return self + (-other)

    def __neg__(self) -> "ChernClass":
        return ChernClass(-self.r, tuple(-a for a in self.d), -self.e, -self.c2)

    def scale(self, m: Scalar) -> "ChernClass":
        return ChernClass(m * self.r, tuple(m * a for a in self.d), m * self.e,
                          m * self.c2)

    def shift(self, n: int) -> "ChernClass":
        """Class of the n-fold homological shift: multiplies by (-1)^n."""
        return self if n % 2 == 0 else -self

    def as_floats(self) -> tuple:
        return (float(self.r), tuple(float(x) for x in self.d), float(self.e),
                float(self.c2))

    def key(self) -> tuple:
        return (self.r, self.d, self.e, self.c2)


@dataclass(frozen=True)
class DivisorClass:
    """Real divisor class ``B = f*(sum b_i H_i) + bC * C`` on the blowup."""

    b: tuple
    bC: Scalar

    def __post_init__(self):
        object.__setattr__(self, "b", _vec(self.b))

    @property
    def dot_C(self):
        """Intersection number ``B.C = -bC`` (since ``C.C = -1``)."""
        return -self.bC

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(tuple(a + b for a, b in zip(self.b, other.b)),
                            self.bC + other.bC)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.b), -self.bC)

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def scale(self, m: Scalar) -> "DivisorClass":
        return DivisorClass(tuple(m * a for a in self.b), m * self.bC)


def c_multiple(model: SurfaceModel, s: Scalar) -> DivisorClass:
    """The divisor ``s * C``."""
    return DivisorClass((Fraction(0),) * model.rho, s)


def pullback_divisor(model: SurfaceModel, b: Sequence[Scalar]) -> DivisorClass:
    """The divisor ``f*(sum b_i H_i)``."""
    return DivisorClass(tuple(b), Fraction(0))


# ---------------------------------------------------------------------------
# Chern characters of the catalog objects
# ---------------------------------------------------------------------------

def skyscraper_class(model: SurfaceModel) -> ChernClass:
    """``ch(O_x) = (0, 0, 0, 1)`` for any point ``x``."""
    z = Fraction(0)
    return ChernClass(z, (z,) * model.rho, z, Fraction(1))


def oc_class(model: SurfaceModel, k: int, shift: int = 0) -> ChernClass:
    """``ch(O_C(k)[n])``.

    Grothendieck-Riemann-Roch on the (-1)-curve gives
    ``ch(O_C(k)) = C + (k + 1/2) [pt]``; a homological shift by ``n``
    multiplies the class by ``(-1)^n``.
    """
    z = Fraction(0)
    base = ChernClass(z, (z,) * model.rho, Fraction(1), Fraction(k) + Fraction(1, 2))
    return base.shift(shift)


def pullback_structure_class(model: SurfaceModel) -> ChernClass:
    """``ch(f* O_Y) = (1, 0, 0, 0)``."""
    z = Fraction(0)
    return ChernClass(Fraction(1), (z,) * model.rho, z, z)


def pullback_line_class(model: SurfaceModel, L: Sequence[Scalar]) -> ChernClass:
    """``ch(f* L) = (1, L, 0, L^2_Y / 2)`` for a line bundle ``L`` on ``Y``."""
    l = tuple(as_fraction(x) for x in L)
    return ChernClass(Fraction(1), l, Fraction(0),
                      model.dot_Y(l, l) / 2)


def chern_of(model: SurfaceModel, name: str, L: Sequence[Scalar] | None = None) -> ChernClass:
    """Resolve a catalog object name to its lattice class.

    Accepted names: ``O_x`` (and the aliases ``O_x_onC`` / ``O_x_offC`` /
    ``f*O_y``), ``O_C(k)`` with optional shift suffix ``[n]``, ``f*O_Y``,
    and ``f*L`` (requires the divisor coefficients of ``L``).
    """
    if name in ("O_x", "O_x_onC", "O_x_offC", "f*O_y"):
        return skyscraper_class(model)
    if name == "f*O_Y":
        return pullback_structure_class(model)
    if name == "f*L":
        if L is None:
            raise ValueError("f*L requires the divisor coefficients of L")
        return pullback_line_class(model, L)
    m = _NAME_RE.match(name)
    if m:
        k = int(m.group(1))
        n = int(m.group(2)) if m.group(2) is not None else 0
        return oc_class(model, k, n)
    raise ValueError(f"unknown catalog object name {name!r}")


def twist(model: SurfaceModel, v: ChernClass, B: DivisorClass) -> ChernClass:
    """Twisted Chern character ``ch^B(v) = e^{-B} ch(v)``.

    Componentwise: ``ch_0^B = ch_0``, ``ch_1^B = ch_1 - B ch_0``,
    ``ch_2^B = ch_2 - B.ch_1 + (B^2/2) ch_0``.  Exact when ``B`` and ``v``
    are rational.
    """
    d1 = tuple(v.d[i] - B.b[i] * v.r for i in range(model.rho))
    e1 = v.e - B.bC * v.r
    c2 = v.c2 - model.ch1_pairing(v, B) + model.divisor_square(B) * v.r / 2
    return ChernClass(v.r, d1, e1, c2)


def euler_pairing_point_curve(k: int, model: SurfaceModel | None = None):
    """Euler characteristic ``chi(O_C(k))`` computed by Riemann-Roch on X.

    ``chi(E) = ch_2(E) + ch_1(E).(-K_X)/2`` for a rank-zero class; with
    ``C.(-K_X) = 1`` this evaluates to ``k + 1``.
    """
    model = model or default_model()
    v = oc_class(model, k)
    minus_kx = DivisorClass(tuple(-x for x in model.KY), Fraction(-1))
    chi = v.c2 + model.ch1_pairing(v, minus_kx) / 2
    return chi


# ---------------------------------------------------------------------------
# Catalog of test objects with declared HN data
# ---------------------------------------------------------------------------

# Region keys for declared Harder-Narasimhan factor lists.
REGION_GEOMETRIC = "geometric"
REGION_GLUED = "glued"


@dataclass(frozen=True)
class CatalogObject:
    """A named test object with its class and declared HN-factor model.

    ``hn_factors`` maps a region key to a tuple of ``(name, shift)`` pairs;
    a missing key means the object is modeled as stable (its own single
    factor) in that region.  The declaration is a modeling assumption: the
    lattice cannot compute HN filtrations, so the factor lists are the
    boundary Jordan-Hoelder data extended into the adjacent regions.
    """

    name: str
    chern: ChernClass
    base: str
    shift: int = 0
    hn_factors: Mapping[str, tuple] = field(default_factory=dict)

    def factors_in(self, region: str) -> tuple:
        got = self.hn_factors.get(region)
        if got is None:
            return ((self.name, 0),)
        return tuple(got)


def build_catalog(model: SurfaceModel, bound: int | None = None, k: int = -1,
                  line_bundle: Sequence[Scalar] | None = None) -> dict:
    """Default object catalog around the index-``k`` gluing story.

    Includes skyscrapers on and off ``C``, the twists ``O_C(j)`` for
    ``|j| <= bound``, the shifts ``O_C(k)[1]`` and ``O_C(k)[2]`` used by the
    path diagnostics, and the pullbacks ``f*O_Y``, ``f*O_y`` and ``f*L``.

    In glued regions the skyscraper on ``C`` is declared to have the
    Jordan-Hoelder factors ``{O_C(k+1), O_C(k)[1]}`` of the index-``k``
    boundary story; everything else is declared stable.
    """
    bound = model.catalog_bound if bound is None else bound
    lb = tuple(line_bundle) if line_bundle is not None else (1,) + (0,) * (model.rho - 1)

    objs = {}

    def add(name, chern, base, shift=0, hn=None):
        objs[name] = CatalogObject(name, chern, base, shift, hn or {})

    sky = skyscraper_class(model)
    add("O_x_offC", sky, "O_x_offC")
    add("f*O_y", sky, "f*O_y")
    add(
        "O_x_onC",
        sky,
        "O_x_onC",
        hn={REGION_GLUED: ((f"O_C({k + 1})", 0), (f"O_C({k})", 1))},
    )
    for j in range(-bound, bound + 1):
        add(f"O_C({j})", oc_class(model, j), f"O_C({j})")
    for n in (1, 2):
        add(f"O_C({k})[{n}]", oc_class(model, k, n), f"O_C({k})", shift=n)
    add("f*O_Y", pullback_structure_class(model), "f*O_Y")
    add("f*L", pullback_line_class(model, lb), "f*L")
    return objs


def hn_factor_classes(model: SurfaceModel, obj: CatalogObject, region: str,
                      catalog: Mapping[str, CatalogObject]) -> list:
    """Classes (with shift signs) of the declared factors of ``obj``."""
    out = []
    for name, extra in obj.factors_in(region):
        base = catalog[name].chern if name in catalog else chern_of(model, name)
        out.append((name, extra, base.shift(extra)))
    return out
