"""Complex exponential integral Ei and the uniform threshold finder.

``ei(z)`` evaluates the principal branch of the exponential integral

    Ei(z) = gamma + Log z + sum_{k>=1} z^k / (k * k!)

on ``C \\ R_{<=0}``, and the Cauchy principal value (the real function
``gamma + log|x| + sum x^k/(k*k!)``) on the negative real axis.  Three
evaluation regimes are used:

* ``series``   -- the power series, for ``|z| <= 40``.  Plain compensated
  summation is catastrophically cancellative once ``|z| - Re z`` is large
  (the terms peak near ``e^{|z|}`` while the sum stays ``O(e^{Re z})``), so
  in that wedge the series is summed in exact rational arithmetic and
  rounded once at the end.
* ``asymptotic`` -- ``(e^z/z) sum_k k!/z^k`` truncated at the smallest
  term, for ``|z| > 40``, plus the constant ``i*pi*sign(Im z)``.  The
  constant is the Stokes contribution of the principal branch: for
  ``Im z != 0`` the two boundary values on the negative axis are
  ``Ei_pv(x) +- i*pi``, and on the imaginary axis Ei tends to ``+-i*pi``
  rather than to zero.  Dropping it would be an ``O(1)`` error wherever
  ``e^z/z`` is not large.
* ``pv-real``  -- real arithmetic on ``R_{<0}``.

Argument trajectories of ``Ei(lambda t)`` are tracked as continuous lifts
(never wrapped back to the principal interval); ``continuous_argument``
provides the shared unwrapping utility.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EULER_GAMMA = 0.5772156649015328606065120900824024

_SERIES_RADIUS = 40.0
# Beyond this much cancellation the double-precision series is summed
# exactly; e^12/eps leaves ~ 3e-11 absolute error, within the 1e-10 budget.
_EXACT_CANCELLATION = 12.0


class EiDomainError(ValueError):
    """Raised for ``z = 0`` (logarithmic singularity)."""


@dataclass(frozen=True)
class EiValue:
    """Value of Ei with the regime used and an absolute error bound."""

    value: complex
    regime: str
    est_error: float

    def __complex__(self) -> complex:
        return self.value


def _series_kahan(z: complex) -> tuple:
    """Compensated power-series sum; returns (sum, sum of |terms|)."""
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    abs_sum = 0.0
    term = 1.0 + 0.0j
    k = 0
    while True:
        k += 1
        term = term * z * (k - 1 if k > 1 else 1) / (k * k) if k > 1 else z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_sum += abs(term)
        if k > 2 * abs(z) + 8 and abs(term) < 1e-20 * (1.0 + abs(total)):
            break
        if k > 500:
            break
    return total, abs_sum


def _series_exact(z: complex) -> complex:
    """Power-series sum in exact integer arithmetic, rounded once.

    Writing ``z = (A + iB) / 2^P`` exactly (floats are dyadic) and scaling
    the partial sum by the structured denominator ``D_k = 2^{Pk} (k!)^2``
    keeps every step in integer arithmetic: the ``k``-th term scaled by
    ``D_k`` is ``(A + iB)^k (k-1)!``, so the recurrence multiplies the
    running term by ``(A + iB) k`` and rescales the sum by ``2^P (k+1)^2``.
    One rational-to-float conversion at the end gives a correctly rounded
    value, immune to the catastrophic cancellation that limits compensated
    double-precision summation when ``|z| - Re z`` is large.
    """
    xr, dr = float(z.real).as_integer_ratio()
    xi, di = float(z.imag).as_integer_ratio()
    P = max(dr.bit_length(), di.bit_length()) - 1
    A = xr * (2 ** P // dr)
    B = xi * (2 ** P // di)
    two_p = 2 ** P

    K = int(3.8 * abs(z)) + 24
    # term numerator (A+iB)^k (k-1)!; sum numerator over D_k = 2^{Pk}(k!)^2
    tre, tim = A, B
    sre, sim = A, B
    for k in range(1, K):
        nre = (tre * A - tim * B) * k
        nim = (tre * B + tim * A) * k
        tre, tim = nre, nim
        scale = two_p * (k + 1) * (k + 1)
        sre = sre * scale + tre
        sim = sim * scale + tim
    den = 2 ** (P * K) * math.factorial(K) ** 2
    return complex(float(Fraction(sre, den)), float(Fraction(sim, den)))


def _series_real_exact(x: float) -> float:
    return _series_exact(complex(x, 0.0)).real


def _asymptotic(z: complex) -> tuple:
    """Optimally truncated divergent tail; returns (sum, |first omitted|)."""
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    k = 0
    kmax = int(abs(z))
    while k < kmax:
        k += 1
        nxt = term * k / z
        if abs(nxt) >= abs(term):
            return total, abs(nxt)
        term = nxt
        total += term
    return total, abs(term * (k + 1) / z)


def ei(z: complex) -> EiValue:
    """Principal-branch exponential integral with error estimate.

    Raises :class:`EiDomainError` at ``z = 0``.  On ``R_{<0}`` the Cauchy
    principal value is returned and flagged with regime ``pv-real``.
    """
    z = complex(z)
    if z == 0:
        raise EiDomainError("Ei has a logarithmic singularity at 0")

    if z.imag == 0.0 and z.real < 0.0:
        x = z.real
        if -x > _SERIES_RADIUS:
            s, omitted = _asymptotic(complex(x))
            pref = math.exp(x) / x
            val = pref * s.real
            err = abs(pref) * omitted * (1.0 + math.sqrt(2 * math.pi * abs(x)))
            return EiValue(complex(val, 0.0), "pv-real", err + 4e-16 * abs(val))
        core = _series_real_exact(x) if -x > _EXACT_CANCELLATION else None
        if core is None:
            s, abs_sum = _series_kahan(complex(x))
            core = s.real
            err = 4e-16 * (abs_sum + abs(core)) + 1e-22
        else:
            err = 4e-16 * abs(core) + 1e-22
        val = EULER_GAMMA + math.log(-x) + core
        return EiValue(complex(val, 0.0), "pv-real", err + 4e-16 * (1 + abs(val)))

    az = abs(z)
    if az <= _SERIES_RADIUS:
        head = EULER_GAMMA + cmath.log(z)
        if az - z.real > _EXACT_CANCELLATION and az > 6.0:
            core = _series_exact(z)
            err = 8e-16 * (abs(core) + abs(head)) + 1e-22
        else:
            core, abs_sum = _series_kahan(z)
            err = 4e-16 * (abs_sum + abs(head)) + 1e-22
        return EiValue(head + core, "series", err)

    s, omitted = _asymptotic(z)
    pref = cmath.exp(z) / z
    val = pref * s
    if z.imag > 0:
        val += 1j * math.pi
    elif z.imag < 0:
        val -= 1j * math.pi
    err = abs(pref) * omitted * (1.0 + math.sqrt(2 * math.pi * az)) + 4e-16 * abs(val)
    return EiValue(val, "asymptotic", err)


def ei_value(z: complex) -> complex:
    """Shorthand for ``ei(z).value``."""
    return ei(z).value


def ei_derivative(lam: complex, t: float) -> complex:
    """``d/dt Ei(lambda t) = e^{lambda t} / t`` for ``t > 0``."""
    if t <= 0:
        raise ValueError("ei_derivative requires t > 0")
    if lam * t == 0:
        raise EiDomainError("lambda * t must be nonzero")
    return cmath.exp(lam * t) / t


# ---------------------------------------------------------------------------
# Continuous argument lifts
# ---------------------------------------------------------------------------

def continuous_argument(values, start: float | None = None) -> np.ndarray:
    """Unwrapped argument along a sampled complex path.

    The lift starts at the principal argument of the first sample unless
    ``start`` is given, in which case the whole lift is offset so that the
    first entry equals ``start`` (which must differ from the principal
    value by a multiple of ``2*pi`` up to numerical noise -- it is the
    caller's chosen branch).
    """
    vals = np.asarray(values, dtype=complex)
    if vals.size == 0:
        return np.zeros(0)
    angles = np.unwrap(np.angle(vals))
    if start is not None:
        offset = start - angles[0]
        turns = round(offset / (2 * math.pi))
        angles = angles + 2 * math.pi * turns
        residue = start - angles[0]
        if abs(residue) > 1e-6:
            raise ValueError(
                f"requested start {start} is not a 2*pi-shift of the "
                f"principal argument {angles[0] - 2 * math.pi * turns}"
            )
        # absorb the sub-2pi residue exactly so the lift starts at `start`
        angles = angles + residue
    return angles


# ---------------------------------------------------------------------------
# Uniform threshold of Lemma-style |Ei| growth and argument monotonicity
# ---------------------------------------------------------------------------

class ThresholdNotFound(RuntimeError):
    """No admissible threshold below the hard cap (pathological box)."""


def _box_corners(box) -> tuple:
    if isinstance(box, (int, float, complex)):
        z = complex(box)
        return z.real, z.real, z.imag, z.imag
    re_min, re_max, im_min, im_max = box
    return float(re_min), float(re_max), float(im_min), float(im_max)


def _threshold_for_lambda(lam: complex, eps: float, t_floor: float,
                          t_cap: float) -> float:
    window = 32.0
    n_check = 129
    t = t_floor
    while t <= t_cap:
        ts = np.geomspace(t, t * window, n_check)
        vals = np.array([ei_value(lam * u) for u in ts])
        ok = bool(np.all(np.abs(vals) > eps))
        if ok and lam.imag != 0.0:
            args = continuous_argument(vals)
            diffs = np.diff(args)
            ok = bool(np.all(np.sign(diffs) == math.copysign(1.0, lam.imag)))
        if ok:
            # analytic tail guard at the window end: the asymptotic regime
            # must dominate so both conditions persist for all larger t.
            zt = lam * ts[-1]
            azt = abs(zt)
            if lam.real > 0 and azt >= 8.0:
                lower = abs(cmath.exp(zt) / zt) * (1 - 2 / azt) - math.pi
                margin_ok = lower > max(eps, 4 * math.pi)
                if lam.imag != 0.0:
                    # |lambda| * |relative correction| must stay below |Im lambda|
                    corr = abs(lam) * (2 / azt + math.pi * azt * math.exp(-zt.real))
                    margin_ok = margin_ok and corr < 0.5 * abs(lam.imag)
                if margin_ok:
                    return t
            elif lam.imag == 0.0 and lam.real > 0:
                # real ray: Ei is increasing once positive, scan suffices
                if vals[0].real > eps:
                    return t
        t *= 1.3
    raise ThresholdNotFound(
        f"no threshold below cap {t_cap} for lambda={lam} (eps={eps})"
    )


def find_T0(lam_box, eps: float, grid: int = 7, t_floor: float = 1.0,
            t_cap: float = 1.0e6, margin: float = 1.25) -> float:
    """Uniform time threshold over a compact box of ``lambda`` values.

    Returns ``T0`` such that for every grid point ``lambda`` in the box,
    ``|Ei(lambda t)| > eps`` for all ``t >= T0``, and for ``Im lambda != 0``
    the unwrapped argument of ``Ei(lambda t)`` is numerically monotone with
    the sign of ``Im lambda``.  The per-``lambda`` threshold is found by a
    windowed scan with an asymptotic tail guard; the box maximum is
    inflated by ``margin``.

    Raises ``ValueError`` if the box contains 0 and
    :class:`ThresholdNotFound` if no threshold exists below ``t_cap``
    (e.g. ``Re lambda <= 0``, where ``|Ei|`` stays bounded).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    re_min, re_max, im_min, im_max = _box_corners(lam_box)
    if re_min <= 0 <= re_max and im_min <= 0 <= im_max:
        raise ValueError("lambda box must not contain 0")
    res = np.linspace(re_min, re_max, 1 if re_min == re_max else grid)
    ims = np.linspace(im_min, im_max, 1 if im_min == im_max else grid)
    worst = t_floor
    for re in res:
        for im in ims:
            lam = complex(re, im)
            worst = max(worst, _threshold_for_lambda(lam, eps, t_floor, t_cap))
    return margin * worst
