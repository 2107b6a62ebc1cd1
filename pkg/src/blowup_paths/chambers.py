"""Region classification, walls, and the support-property sector constant.

Inside the fiber over a fixed normalized Y-charge, a glued datum is the
pair ``(lambda, k)``: the one-object charge ``tau_lambda`` sends the class
of the exceptional twist ``O_C(k)`` to ``e^lambda``.  The region geometry
is one-dimensional in ``lambda``:

* ``Im lambda > pi``   -- glued region with the exceptional object on the
  right (label ``GluedR(k)``);
* ``Im lambda <= -pi`` -- glued region with the exceptional object on the
  left (label ``GluedL(k)``);
* ``Im lambda = pi``   -- the boundary wall, which splits by the sign of
  ``Re lambda``: the wall object has charge ``-1 - e^lambda``, negative
  real (phase one) for ``Re lambda < 0`` (wall ``W0``) and positive real
  (phase zero) for ``Re lambda > 0`` (wall ``W-1``); ``Re lambda = 0`` is
  degenerate (the wall object's charge vanishes).

``W2`` is the locus where the tracked phase of ``O_C`` equals two; it is
meaningful only along a path, so membership takes an unwrapped lift.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .lattice import DivisorClass, SurfaceModel

WALL_W0 = "W0"
WALL_WM1 = "W-1"
WALL_W2 = "W2"

_WALL_TOL = 1e-12


class DegenerateGluingError(ValueError):
    """``Im lambda = pi`` with ``Re lambda = 0``: the wall object's charge
    vanishes, violating the nondegeneracy assumption."""


class HalfIntegerWallError(ValueError):
    """``B.C`` lies in ``Z + 1/2``, the wall of the boundary family."""


@dataclass(frozen=True)
class RegionLabel:
    tag: str  # Geometric | GluedR | GluedL | CkBoundary | Wall | Unknown
    k: int | None = None
    wall: str | None = None
    evidence: tuple = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps(
            {"tag": self.tag, "k": self.k, "wall": self.wall,
             "evidence": [[name, _as_jsonable(val)] for name, val in self.evidence]},
            sort_keys=True)

    def render(self) -> str:
        if self.tag == "Wall":
            return f"Wall({self.wall})"
        if self.k is not None:
            return f"{self.tag}({self.k})"
        return self.tag


def _as_jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def classify_glued(lam: complex, k: int) -> RegionLabel:
    """Classify the glued datum ``(tau_lambda, k)`` by ``Im lambda``.

    The criterion depends only on ``lambda``; ``k`` is bookkeeping for the
    label.  On the wall line the verdict follows the sign of the wall
    object's charge ``-1 - e^lambda``.
    """
    import cmath

    im, re = lam.imag, lam.real
    wall_charge = -1 - cmath.exp(lam)
    ev = (("im_lambda", im), ("re_lambda", re), ("pi", math.pi),
          ("wall_object_charge", wall_charge))
    if im > math.pi + _WALL_TOL:
        return RegionLabel("GluedR", k=k, evidence=ev)
    if im <= -math.pi + _WALL_TOL:
        return RegionLabel("GluedL", k=k, evidence=ev)
    if abs(im - math.pi) <= _WALL_TOL:
        if abs(re) <= _WALL_TOL:
            raise DegenerateGluingError(
                "Im lambda = pi with Re lambda = 0: wall object charge vanishes")
        wall = WALL_W0 if re < 0 else WALL_WM1
        return RegionLabel("Wall", k=k, wall=wall, evidence=ev)
    return RegionLabel("Unknown", k=k, evidence=ev)


def ck_window(model: SurfaceModel, B: DivisorClass) -> int:
    """The unique ``k`` with ``B.C`` in ``(k - 1/2, k + 1/2)``.

    Raises :class:`HalfIntegerWallError` on half-integers, where the
    boundary family degenerates.
    """
    x = B.dot_C
    if isinstance(x, (int, Fraction)):
        fx = Fraction(x)
        if (fx - Fraction(1, 2)).denominator == 1:
            raise HalfIntegerWallError(f"B.C = {fx} lies in Z + 1/2")
        return int(math.floor(fx + Fraction(1, 2)))
    fx = float(x)
    nearest_half = math.floor(fx) + 0.5
    if abs(fx - nearest_half) < 1e-12:
        raise HalfIntegerWallError(f"B.C = {fx} lies in Z + 1/2 (numerically)")
    return int(math.floor(fx + 0.5))


# ---------------------------------------------------------------------------
# Le Potier bound for the geometric chamber
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LePotierModel:
    """Slope-indexed ch_2 bound with a provenance tag.

    The true bound is surface-specific; the default ``x^2/2`` is only a
    sufficient certificate, so verdicts derived from it are conservative.
    """

    phi: Callable[[float], float]
    provenance: str = "conservative-default"


def default_le_potier() -> LePotierModel:
    return LePotierModel(phi=lambda x: 0.5 * x * x)


def geometric_test(alpha: float, beta: float, lp: LePotierModel | None = None) -> bool:
    """``Phi(alpha) > beta``; with the default model a ``True`` is only a
    sufficient geometric certificate."""
    lp = lp or default_le_potier()
    return lp.phi(alpha) > beta


def w2_membership(arg_lift_oc: float, tol: float = 1e-9) -> bool:
    """Wall ``W2``: glued on the R-side with the tracked phase of ``O_C``
    equal to two.  Takes the unwrapped argument lift of ``Z(O_C)``."""
    return arg_lift_oc > math.pi and abs(arg_lift_oc / math.pi - 2.0) <= tol


# ---------------------------------------------------------------------------
# Wall-crossing times along a path
# ---------------------------------------------------------------------------

class NoSignChangeError(RuntimeError):
    """The scanned interval contains no admissible sign change."""


@dataclass(frozen=True)
class WallCrossing:
    t_star: float
    bracket: tuple
    im_at_root: float
    abs_at_root: float
    evidence: tuple = field(default_factory=tuple)


def find_wall_crossing(zfun: Callable[[float], complex], t_lo: float,
                       t_hi: float, target: str = "im-zero-from-above",
                       n_scan: int = 4096) -> WallCrossing:
    """First admissible root of ``Im Z(t)`` on ``(t_lo, t_hi]``.

    ``target='im-zero-from-above'`` looks for the wall hit where the
    argument lift reaches ``-pi`` from above: a sign change of the
    imaginary part with negative real part (phase-zero crossings, where
    the real part is positive, are skipped).  ``target='im-zero-any'``
    takes the first sign change unconditionally.  The root is polished by
    Brent's method; the bracketing pair is returned as evidence.
    """
    if not t_hi > t_lo > 0:
        raise ValueError("need 0 < t_lo < t_hi")
    ts = np.linspace(t_lo, t_hi, n_scan + 1)
    vals = np.array([zfun(t) for t in ts])
    ims = vals.imag
    res = vals.real
    sign = np.sign(ims)
    for i in range(len(ts) - 1):
        if sign[i] == 0 and i > 0:
            continue
        if sign[i] * sign[i + 1] < 0 or (sign[i + 1] == 0 and sign[i] != 0):
            if target == "im-zero-from-above" and not (res[i] < 0 and res[i + 1] < 0):
                continue
            root = brentq(lambda t: zfun(t).imag, ts[i], ts[i + 1],
                          xtol=1e-15 * max(1.0, ts[i]), rtol=8.9e-16)
            z = zfun(root)
            return WallCrossing(
                t_star=float(root), bracket=(float(ts[i]), float(ts[i + 1])),
                im_at_root=z.imag, abs_at_root=abs(z),
                evidence=(("im_lo", float(ims[i])), ("im_hi", float(ims[i + 1])),
                          ("re_lo", float(res[i])), ("re_hi", float(res[i + 1])),
                          ("grid_cell", float(ts[1] - ts[0]))))
    raise NoSignChangeError(
        f"no {target} sign change of Im Z on ({t_lo}, {t_hi}] with {n_scan} cells")


# ---------------------------------------------------------------------------
# Sector constant of the support property
# ---------------------------------------------------------------------------

def sector_constant(theta: float) -> float:
    """Infimum of ``|sum z_i| / sum |z_i|`` over tuples in the sector
    ``{r e^{i pi phi} : phi in [theta, 1]}``.

    For an opening of at most ``pi`` the infimum is attained by the pair of
    extreme unit rays, giving ``cos(pi (1 - theta) / 2)`` in closed form.
    """
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    return math.cos(math.pi * (1.0 - theta) / 2.0)
