"""Central charges as complex-linear functionals on the blowup lattice.

Every charge kind (geometric, normalized, glued over a fixed Y-charge,
time-dependent path snapshot) is stored as one coefficient vector against
the basis ``(rank, f*H_1..f*H_rho, C, point)``, so evaluation is a single
complex dot product and all kinds serialize uniformly.

Conventions fixed here:

* geometric charges follow ``Z_{B,H} = -ch_2^B + (H^2/2) ch_0^B + i H.ch_1^B``,
  which in untwisted characters is
  ``((H^2 - B^2)/2 - i B.H) ch_0 + (B + iH).ch_1 - ch_2``;
* normalized charges are ``(alpha - i beta) ch_0 + (B + i omega).ch_1 - ch_2``
  and satisfy ``Z(O_x) = -1`` identically;
* a glued charge over a normalized Y-charge sends ``f*u`` to ``Z_Y(u)``
  and the class of ``O_C(k+1)`` to ``e^lambda``;
* the path charge is
  ``Z_t(E) = w (Ei(lam t) - Ei(lam T0)) ch_1^{-sC}(E).C + Z_0(e^{sC} ch(E))``
  with ``ch_1^{-sC}(E).C = -e(E) - s r(E)``.  The twist by ``sC`` is
  realized as ``Z_{0,sC}(v) = Z_0(twist(v, -sC))`` so that ``s = 0`` is the
  identity and the boundary family reproduces ``Z_{B - sC, f*omega}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .lattice import (
    ChernClass,
    DivisorClass,
    SurfaceModel,
    as_fraction,
    oc_class,
)
from .specfun import ei_value


def _c(x) -> complex:
    return complex(float(x), 0.0) if not isinstance(x, complex) else x


@dataclass(frozen=True)
class CentralCharge:
    """A complex-linear functional, stored by its basis values."""

    model: SurfaceModel
    coeffs: tuple  # complex, length 3 + rho: (rank, d_1..d_rho, C, point)
    kind: str
    params: dict = field(default_factory=dict)

    def __call__(self, v: ChernClass) -> complex:
        return self.evaluate(v)

    def evaluate(self, v: ChernClass) -> complex:
        rho = self.model.rho
        total = self.coeffs[0] * float(v.r)
        for i in range(rho):
            total += self.coeffs[1 + i] * float(v.d[i])
        total += self.coeffs[1 + rho] * float(v.e)
        total += self.coeffs[2 + rho] * float(v.c2)
        return total

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "basis_values": [[z.real, z.imag] for z in self.coeffs],
                "params": {k: _json_scalar(v) for k, v in sorted(self.params.items())},
            },
            sort_keys=True,
        )


def _json_scalar(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)


# ---------------------------------------------------------------------------
# Geometric and normalized charges on X
# ---------------------------------------------------------------------------

def geometric_charge(model: SurfaceModel, B: DivisorClass, H: DivisorClass) -> CentralCharge:
    """Bridgeland-style surface charge ``Z_{B,H}``.

    Requires ``H^2 > 0`` as the numerically checkable part of ampleness.
    """
    h2 = float(model.divisor_square(H))
    if h2 <= 0:
        raise ValueError(f"H^2 = {h2} must be positive")
    b2 = float(model.divisor_square(B))
    bh = float(model.divisor_dot(B, H))
    coeff_r = complex((h2 - b2) / 2.0, -bh)
    coeff_d = []
    for i in range(model.rho):
        coeff_d.append(
            complex(
                sum(float(model.QY[i][j]) * float(B.b[j]) for j in range(model.rho)),
                sum(float(model.QY[i][j]) * float(H.b[j]) for j in range(model.rho)),
            )
        )
    coeff_e = complex(-float(B.bC), -float(H.bC))
    coeff_c2 = complex(-1.0, 0.0)
    return CentralCharge(
        model,
        (coeff_r, *coeff_d, coeff_e, coeff_c2),
        "geometric",
        {"B_b": tuple(float(x) for x in B.b), "B_bC": float(B.bC),
         "H_b": tuple(float(x) for x in H.b), "H_bC": float(H.bC)},
    )


def normalized_charge(model: SurfaceModel, alpha: float, beta: float,
                      B: DivisorClass, omega: DivisorClass) -> CentralCharge:
    """``Z = (alpha - i beta) ch_0 + (B + i omega).ch_1 - ch_2``."""
    coeff_r = complex(alpha, -beta)
    coeff_d = tuple(
        complex(
            sum(float(model.QY[i][j]) * float(B.b[j]) for j in range(model.rho)),
            sum(float(model.QY[i][j]) * float(omega.b[j]) for j in range(model.rho)),
        )
        for i in range(model.rho)
    )
    coeff_e = complex(-float(B.bC), -float(omega.bC))
    return CentralCharge(
        model,
        (coeff_r, *coeff_d, coeff_e, complex(-1.0, 0.0)),
        "normalized",
        {"alpha": alpha, "beta": beta},
    )


# ---------------------------------------------------------------------------
# Y-side charges and the class decomposition used for gluing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class YClass:
    """Class ``(ch_0, ch_1, ch_2)`` in the numerical lattice of ``Y``."""

    r: object
    d: tuple
    c2: object

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(self.d))

    @staticmethod
    def point(rho: int) -> "YClass":
        return YClass(Fraction(0), (Fraction(0),) * rho, Fraction(1))

    @staticmethod
    def structure(rho: int) -> "YClass":
        return YClass(Fraction(1), (Fraction(0),) * rho, Fraction(0))

    def key(self):
        return (self.r, self.d, self.c2)


@dataclass(frozen=True)
class YCharge:
    """Normalized geometric charge data on the ``(2 + rho)``-dim Y-lattice.

    ``Z_Y = (alpha - i beta) ch_0 + (B_Y + i omega_Y).ch_1 - ch_2``; every
    charge of this shape sends the point class to ``-1``.
    """

    model: SurfaceModel
    alpha: float
    beta: float
    B: tuple
    omega: tuple

    def coeffs(self) -> tuple:
        rho = self.model.rho
        coeff_r = complex(self.alpha, -self.beta)
        coeff_d = tuple(
            complex(
                sum(float(self.model.QY[i][j]) * float(self.B[j]) for j in range(rho)),
                sum(float(self.model.QY[i][j]) * float(self.omega[j]) for j in range(rho)),
            )
            for i in range(rho)
        )
        return (coeff_r, *coeff_d, complex(-1.0, 0.0))

    def evaluate(self, u: YClass) -> complex:
        cs = self.coeffs()
        total = cs[0] * float(u.r)
        for i in range(self.model.rho):
            total += cs[1 + i] * float(u.d[i])
        total += cs[1 + self.model.rho] * float(u.c2)
        return total

    def __call__(self, u: YClass) -> complex:
        return self.evaluate(u)


def decompose_class(model: SurfaceModel, v: ChernClass, k: int):
    """Write ``v = f*w + m * ch(O_C(k))`` with ``w`` on the Y-lattice.

    The decomposition is unique: ``m = e(v)`` and
    ``w = (r, d, c2 - m (k + 1/2))``.  Exact in rational arithmetic.
    """
    m = as_fraction(v.e) if not isinstance(v.e, float) else v.e
    kk = Fraction(k) + Fraction(1, 2)
    w = YClass(v.r, v.d, v.c2 - m * kk)
    return w, m


def recompose_class(model: SurfaceModel, w: YClass, m, k: int) -> ChernClass:
    """Inverse of :func:`decompose_class`."""
    base = oc_class(model, k).scale(m)
    return ChernClass(w.r + base.r,
                      tuple(a + b for a, b in zip(w.d, base.d)),
                      base.e, w.c2 + base.c2)


def glued_charge(model: SurfaceModel, ZY: YCharge, lam: complex, k: int) -> CentralCharge:
    """Charge glued from ``Z_Y`` and the one-object charge ``tau_lambda``.

    ``Z(v) = Z_Y(w) + m e^lambda`` for ``v = f*w + m ch(O_C(k+1))``; in
    particular ``Z(f*u) = Z_Y(u)`` exactly and ``Z(O_C(k+1)) = e^lambda``.
    The region bookkeeping (whether Im lambda admits an actual glued
    stability condition) lives in :mod:`blowup_paths.chambers`.
    """
    import cmath

    cs = ZY.coeffs()
    rho = model.rho
    elam = cmath.exp(lam)
    # ch(O_C(k+1)) has c2-part k + 3/2; substituting the decomposition into
    # Z_Y gives the C-coefficient below while the f*-part passes through.
    coeff_e = elam - (float(k) + 1.5) * cs[1 + rho]
    coeffs = (cs[0], *cs[1:1 + rho], coeff_e, cs[1 + rho])
    return CentralCharge(model, coeffs, "glued",
                         {"lambda": lam, "k": k, "e_lambda": elam})


# ---------------------------------------------------------------------------
# Time-dependent path charges
# ---------------------------------------------------------------------------

FAMILY_BOUNDARY = "start-in-boundary"
FAMILY_W2 = "start-in-W2"
FAMILY_INTRO = "intro-g"


@dataclass(frozen=True)
class PathConfig:
    """Frozen parameters of one path of central charges.

    ``weight`` is the resolved complex number ``w(s, lambda, Z_0)``; the two
    construction policies live in :mod:`blowup_paths.paths`.
    """

    model: SurfaceModel
    family: str
    s: float
    lam: complex
    T0: float
    weight: complex
    Z0: CentralCharge
    meta: dict = field(default_factory=dict)

    def twisted_base_coeffs(self) -> tuple:
        """Coefficients of ``v -> Z_0(twist(v, -sC))``."""
        rho = self.model.rho
        z = self.Z0.coeffs
        s = float(self.s)
        coeff_r = z[0] + s * z[1 + rho] - (s * s / 2.0) * z[2 + rho]
        coeff_e = z[1 + rho] - s * z[2 + rho]
        return (coeff_r, *z[1:1 + rho], coeff_e, z[2 + rho])

    def time_coeffs(self) -> tuple:
        """Coefficients of ``v -> ch_1^{-sC}(v).C = -e(v) - s r(v)``."""
        rho = self.model.rho
        zero = complex(0.0)
        return (complex(-float(self.s)), *((zero,) * rho), complex(-1.0), zero)

    def g(self, t: float) -> complex:
        """The QDE solution ``w (Ei(lam t) - Ei(lam T0))`` driving the path."""
        return self.weight * (ei_value(self.lam * t) - ei_value(self.lam * self.T0))


def path_charge(cfg: PathConfig, t: float, allow_extension: bool = False) -> CentralCharge:
    """Snapshot of the path charge at time ``t``.

    ``t < T0`` is an error unless ``allow_extension`` is set (used by the
    geometric extension of the boundary family, which evaluates the same
    formula slightly before the starting time).
    """
    if t < cfg.T0 and not allow_extension:
        raise ValueError(f"path charge requires t >= T0 = {cfg.T0}, got {t}")
    g = cfg.g(t)
    base = cfg.twisted_base_coeffs()
    tc = cfg.time_coeffs()
    coeffs = tuple(g * a + b for a, b in zip(tc, base))
    return CentralCharge(cfg.model, coeffs, "path-snapshot",
                         {"family": cfg.family, "s": cfg.s, "lambda": cfg.lam,
                          "T0": cfg.T0, "weight": cfg.weight, "t": t})
