"""Path families, quasi-convergence diagnostics, and induced decompositions.

Two families of time-dependent central charges are constructed, both of
the shape

    Z_t(E) = w * (Ei(lam t) - Ei(lam T0)) * ch_1^{-sC}(E).C + Z_0(e^{sC} ch E):

* ``start-in-boundary`` -- ``Z_0 = Z_{B, f*omega}`` of boundary type with
  ``B.C`` in the ``(C_{-1})`` window; the weight is ``w = Im lam`` (the
  sign table: positive above the real axis, zero on it, negative below).
* ``start-in-W2``       -- ``Z_0`` glued over a normalized Y-charge with
  the tracked phase of ``O_C`` equal to two; the weight is a unit complex
  number ``e^{i theta}`` with ``theta`` chosen from the sampled infimum of
  the unwrapped argument of ``Ei(lam t) - Ei(lam T0)`` so the product's
  lift stays above ``-pi`` (the lower bound is read in radians).

Diagnostics work on sampled trajectories: unwrapped argument lifts seeded
by the initial region's branch, masses and mass-weighted phases from the
declared per-region HN factor lists, and the complex logarithm
``ell_t = log m_t + i pi phi_t``.  Homological shifts act structurally:
``ell_t(E[n]) = ell_t(E) + i pi n`` exactly.

Divergence claims (monotone arguments, growing masses) are certified by a
tail-monotonicity scan plus a linear fit over the last decade, cross
checked against the closed-form asymptotics ``arg ~ Im(lam) t`` and
``log|Z| ~ Re(lam) t``; a fit alone never certifies.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .chambers import RegionLabel, w2_membership
from .charges import (
    FAMILY_BOUNDARY,
    FAMILY_INTRO,
    FAMILY_W2,
    CentralCharge,
    PathConfig,
    YCharge,
    geometric_charge,
    glued_charge,
    path_charge,
)
from .chambers import ck_window
from .lattice import (
    REGION_GLUED,
    CatalogObject,
    ChernClass,
    DivisorClass,
    SurfaceModel,
    build_catalog,
    oc_class,
    pullback_divisor,
)
from .specfun import continuous_argument, ei_value, find_T0


class WeightResolutionError(RuntimeError):
    """The infimum search for the W2 weight failed to stabilize."""

    def __init__(self, message, profile=None):
        super().__init__(message)
        self.profile = profile


class GridTooCoarseError(RuntimeError):
    """Consecutive samples jump by more than the unwrapping limit."""


class InconclusiveError(RuntimeError):
    """No monotonicity certificate; no decomposition can be induced."""


# ---------------------------------------------------------------------------
# Weight policies
# ---------------------------------------------------------------------------

def _delta_ei_arg_profile(lam: complex, T0: float, n: int, t_end: float):
    ts = np.linspace(T0 * (1 + 1e-9), t_end, n)
    vals = np.array([ei_value(lam * t) for t in ts]) - ei_value(lam * T0)
    args = continuous_argument(vals)
    return ts, args


def _inf_delta_ei_arg(lam: complex, T0: float, max_rounds: int = 18) -> float:
    """Sampled infimum of the unwrapped ``arg(Ei(lam t) - Ei(lam T0))``.

    Valid for ``Im lam > 0`` and ``Re lam > 0``: the argument eventually
    increases beyond any level, so the infimum is attained on a finite
    window.  The window grows until the tail is monotone increasing and
    clear of the minimum, then the grid is refined until stable.
    """
    if lam.imag <= 0 or lam.real <= 0:
        raise WeightResolutionError(
            f"infimum policy needs Re/Im lambda > 0, got {lam}")
    t_end = max(3.0 * T0, T0 + 8.0 / lam.imag)
    n = 2001
    profile = None
    for _ in range(max_rounds):
        ts, args = _delta_ei_arg_profile(lam, T0, n, t_end)
        profile = (ts, args)
        tail = args[-(n // 4):]
        tail_monotone = bool(np.all(np.diff(tail) > 0))
        imin = int(np.argmin(args))
        clear_of_tail = imin < len(ts) - n // 4
        if tail_monotone and clear_of_tail and args[-1] > args[imin] + math.pi:
            coarse = args[imin]
            ts2, args2 = _delta_ei_arg_profile(lam, T0, 2 * n - 1, t_end)
            fine = float(np.min(args2))
            if abs(fine - coarse) < 1e-6:
                return min(coarse, fine)
            n = 2 * n - 1
            continue
        t_end *= 1.6
    raise WeightResolutionError(
        f"infimum of arg(Ei(lam t) - Ei(lam T0)) did not stabilize for {lam}",
        profile=profile)


def resolve_weight(family: str, s: float, lam: complex, Z0, T0: float,
                   margin: float = 0.1) -> complex:
    """The resolved weight ``w(s, lam, Z_0)`` for a path family.

    ``start-in-boundary``: ``w = Im lam`` (continuous, matching the sign
    table, zero on the real axis).  ``start-in-W2``: ``w = e^{i theta}``
    with ``theta = -inf_t arg(Ei(lam t) - Ei(lam T0)) - pi + margin``, so
    the unwrapped phase of ``w (Ei(lam t) - Ei(lam T0))`` stays above
    ``-pi``; the mirror policy (conjugation) is used below the real axis,
    and ``w = 1`` on it.
    """
    if family == FAMILY_BOUNDARY:
        return complex(lam.imag)
    if family == FAMILY_W2:
        if lam == 0:
            raise ValueError("lambda must be nonzero for quasi-convergent families")
        if lam.imag == 0:
            return complex(1.0)
        if lam.imag < 0:
            return resolve_weight(family, s, lam.conjugate(), Z0, T0,
                                  margin).conjugate()
        inf_arg = _inf_delta_ei_arg(lam, T0)
        theta = -inf_arg - math.pi + margin
        theta = math.remainder(theta, 2 * math.pi)
        return cmath.exp(1j * theta)
    if family == FAMILY_INTRO:
        return complex(1.0)
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Path construction
# ---------------------------------------------------------------------------

def boundary_path_config(model: SurfaceModel, B: DivisorClass, s: float,
                         lam: complex, omega=None, T0: float = 1.0,
                         weight: complex | None = None) -> PathConfig:
    """Path starting at the boundary charge ``Z_{B - sC, f*omega}``.

    ``B`` must lie in the ``(C_{-1})`` window (``-3/2 < B.C < -1/2``) and
    ``s`` in ``(-3/2 - B.C, -1/2 - B.C)``, so the twisted charge stays in
    the window.  ``T0`` defaults to the natural normalization ``1``; the
    entry direction into the glued region requires ``|Im lam| T0 < pi``.
    """
    if ck_window(model, B) != -1:
        raise ValueError(f"boundary family needs B.C in (-3/2, -1/2), got {B.dot_C}")
    bc = float(B.dot_C)
    lo, hi = -1.5 - bc, -0.5 - bc
    if not lo < s < hi:
        raise ValueError(f"s = {s} outside the window ({lo}, {hi})")
    if T0 < 1.0:
        raise ValueError("T0 must be at least 1")
    if abs(lam.imag) * T0 >= math.pi:
        raise ValueError(
            f"|Im lambda| * T0 = {abs(lam.imag) * T0} must stay below pi "
            "for the glued-entry direction to be controlled")
    omega = tuple(omega) if omega is not None else (1,) + (0,) * (model.rho - 1)
    H = pullback_divisor(model, omega)
    Z0 = geometric_charge(model, B, H)
    w = resolve_weight(FAMILY_BOUNDARY, s, lam, Z0, T0) if weight is None else weight
    return PathConfig(model=model, family=FAMILY_BOUNDARY, s=float(s), lam=lam,
                      T0=float(T0), weight=w, Z0=Z0,
                      meta={"B_bC": float(B.bC), "B_dot_C": bc, "omega": omega})


def w2_path_config(model: SurfaceModel, ZY: YCharge, lam0_re: float, s: float,
                   lam: complex, T0: float | None = None, eps_T0: float = 1.0,
                   weight: complex | None = None) -> PathConfig:
    """Path starting on the wall ``W2`` inside the R-side glued region.

    The initial charge is glued from ``Z_Y`` and ``tau_{lam0}`` with
    ``lam0 = lam0_re + 2 pi i``, so ``Z_0(O_C) = e^{lam0_re} = r > 0`` and
    the tracked phase of ``O_C`` starts at two.  Requires ``s > -r``.

    ``T0`` defaults to the uniform threshold of the ``|Ei|``-growth and
    monotone-argument conditions at ``lam``, floored at ``pi/(4 |Im lam|)``:
    the wall transit consumes an argument descent of order ``pi`` at the
    asymptotic rate ``|Im lam|``, and starting later keeps the transit out
    of the final decade that the tail diagnostics rely on.  (The start
    time necessarily blows up as ``Im lam`` approaches zero.)
    """
    lam0 = complex(lam0_re, 2 * math.pi)
    Z0 = glued_charge(model, ZY, lam0, k=-1)
    r = math.exp(lam0_re)
    if not s > -r:
        raise ValueError(f"s = {s} must exceed -r = {-r}")
    if T0 is None:
        if lam.imag != 0:
            T0 = max(find_T0(lam, eps_T0),
                     0.5 + math.pi / (4.0 * abs(lam.imag)))
        else:
            T0 = max(1.0, find_T0(complex(lam.real), eps_T0))
    w = resolve_weight(FAMILY_W2, s, lam, Z0, T0) if weight is None else weight
    return PathConfig(model=model, family=FAMILY_W2, s=float(s), lam=lam,
                      T0=float(T0), weight=w, Z0=Z0,
                      meta={"lam0_re": lam0_re, "r": r})


def intro_path_config(model: SurfaceModel, Z0: CentralCharge, lam: complex,
                      s: float = 0.0, T0: float = 1.0,
                      weight: complex = 1.0) -> PathConfig:
    """Generic solution family ``g(lam, t) ch_1(E).C + Z_0(E)``."""
    return PathConfig(model=model, family=FAMILY_INTRO, s=float(s), lam=lam,
                      T0=float(T0), weight=complex(weight), Z0=Z0, meta={})


@dataclass
class PathEvaluator:
    """Evaluator ``t -> charge snapshot`` plus catalog and branch data."""

    cfg: PathConfig
    catalog: dict
    initial_lifts: dict
    initial_region: RegionLabel
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def model(self) -> SurfaceModel:
        return self.cfg.model

    def charge_at(self, t: float, allow_extension: bool = False) -> CentralCharge:
        return path_charge(self.cfg, t, allow_extension=allow_extension)

    def value_at(self, t: float, v, allow_extension: bool = False) -> complex:
        if isinstance(v, str):
            v = self.catalog[v].chern
        elif isinstance(v, CatalogObject):
            v = v.chern
        return self.charge_at(t, allow_extension).evaluate(v)

    def zfun(self, v):
        """Closure ``t -> Z_t(v)`` for root finding."""
        return lambda t: self.value_at(t, v)

    def sample(self, horizon: float, grid: int | None = None,
               names=None) -> "SampledPath":
        names = tuple(names) if names is not None else DIAGNOSTIC_OBJECTS
        key = (horizon, grid, names)
        if key not in self._cache:
            self._cache[key] = _sample_path(self, horizon, grid, names)
        return self._cache[key]


def build_path(cfg: PathConfig) -> PathEvaluator:
    """Assemble the evaluator, catalog, and initial argument branches."""
    model = cfg.model
    catalog = build_catalog(model, k=-1)
    Z0s_of = _twisted_initial_values(cfg, catalog)

    lifts = {}
    for name, obj in catalog.items():
        if obj.shift != 0:
            continue
        z0 = Z0s_of(obj.chern)
        lifts[name] = float(np.angle(z0)) if z0 != 0 else 0.0
    if cfg.family == FAMILY_W2:
        z_oc = Z0s_of(catalog["O_C(0)"].chern)
        lifts["O_C(0)"] = 2 * math.pi
        initial_region = RegionLabel(
            "GluedR", k=0, wall="W2",
            evidence=(("arg_lift_OC", 2 * math.pi),
                      ("w2_membership", w2_membership(2 * math.pi)),
                      ("Z0_OC", z_oc)))
    elif cfg.family == FAMILY_BOUNDARY:
        initial_region = RegionLabel(
            "CkBoundary", k=-1,
            evidence=(("B_dot_C_twisted", cfg.meta["B_dot_C"] + cfg.s),))
    else:
        initial_region = RegionLabel("Unknown")
    return PathEvaluator(cfg=cfg, catalog=catalog, initial_lifts=lifts,
                         initial_region=initial_region)


def _twisted_initial_values(cfg: PathConfig, catalog):
    base = cfg.twisted_base_coeffs()
    rho = cfg.model.rho

    def value(v: ChernClass) -> complex:
        total = base[0] * float(v.r)
        for i in range(rho):
            total += base[1 + i] * float(v.d[i])
        total += base[1 + rho] * float(v.e)
        total += base[2 + rho] * float(v.c2)
        return total

    return value


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

@dataclass
class SampledPath:
    """Shared time grid with values, lifts, masses and phases per object."""

    path: PathEvaluator
    ts: np.ndarray
    g: np.ndarray
    values: dict
    lifts: dict
    mass: dict
    phi: dict
    gap: dict  # phi^+ - phi^- from declared factors
    ell: dict
    itinerary: np.ndarray  # region label strings per sample

    def last_decade(self) -> np.ndarray:
        return self.ts >= self.ts[-1] / 10.0


def _grid_size(cfg: PathConfig, horizon: float, grid: int | None) -> int:
    auto = int(math.ceil((horizon - cfg.T0) * abs(cfg.lam.imag) * 4.0 / math.pi)) + 1
    return max(grid or 0, auto, 801)


def _closure_names(path: PathEvaluator, names) -> list:
    """Requested objects plus the itinerary pair and factor parents."""
    wanted = list(names) if names is not None else list(DIAGNOSTIC_OBJECTS)
    closure: list = []

    def add(n):
        if n not in closure:
            if n not in path.catalog:
                raise KeyError(f"object {n!r} not in the path catalog")
            closure.append(n)

    for n in ("O_C(0)", "O_C(-1)"):
        add(n)
    for n in wanted:
        add(n)
        obj = path.catalog[n]
        if obj.shift != 0:
            add(obj.base)
        for fname, _ in obj.factors_in(REGION_GLUED):
            add(fname)
    return closure


def _sample_path(path: PathEvaluator, horizon: float, grid: int | None,
                 names=None) -> SampledPath:
    cfg = path.cfg
    if horizon <= cfg.T0:
        raise ValueError("horizon must exceed T0")
    n = _grid_size(cfg, horizon, grid)
    Z0s_of = _twisted_initial_values(cfg, path.catalog)
    tracked = _closure_names(path, names)

    for attempt in range(4):
        ts = np.linspace(cfg.T0, horizon, n)
        ei_T0 = ei_value(cfg.lam * cfg.T0)
        g = cfg.weight * (np.array([ei_value(cfg.lam * t) for t in ts]) - ei_T0)
        g[0] = 0.0  # Ei difference vanishes identically at T0

        values, lifts = {}, {}
        ok = True
        for name in tracked:
            obj = path.catalog[name]
            if obj.shift != 0:
                continue
            coef = float(-obj.chern.e - cfg.s * obj.chern.r)
            const = Z0s_of(obj.chern)
            vals = g * coef + const
            values[name] = vals
            if np.any(vals == 0):
                raise ZeroDivisionError(
                    f"Z_t({name}) vanishes on the grid; assumption (1) fails")
            ang = np.angle(vals)
            jumps = np.abs(np.diff(np.unwrap(ang)))
            if np.max(jumps, initial=0.0) > 0.9 * math.pi:
                ok = False
                break
            lifts[name] = continuous_argument(vals, start=path.initial_lifts[name])
        if ok:
            break
        n = 2 * n - 1
    else:
        raise GridTooCoarseError(
            f"unwrapping not stable at {n} samples up to horizon {horizon}; "
            "a tracked charge passes too close to zero for a continuous lift")

    # shifted objects: values flip sign with parity, lifts move by shift*pi
    for name in tracked:
        obj = path.catalog[name]
        if obj.shift == 0:
            continue
        parent = obj.base
        pv = values[parent]
        values[name] = pv if obj.shift % 2 == 0 else -pv
        lifts[name] = lifts[parent] + obj.shift * math.pi

    mass, phi, gap, ell = {}, {}, {}, {}
    for name in tracked:
        obj = path.catalog[name]
        if obj.shift != 0:
            continue
        factors = obj.factors_in(REGION_GLUED)
        if len(factors) == 1 and factors[0][0] == name:
            m = np.abs(values[name])
            p = lifts[name] / math.pi
            gp = np.zeros_like(p)
        else:
            ms, ps = [], []
            for fname, extra in factors:
                ms.append(np.abs(values[fname]))
                ps.append(lifts[fname] / math.pi + extra)
            ms = np.array(ms)
            ps = np.array(ps)
            m = ms.sum(axis=0)
            p = (ms * ps).sum(axis=0) / m
            gp = ps.max(axis=0) - ps.min(axis=0)
        mass[name] = m
        phi[name] = p
        gap[name] = gp
        ell[name] = np.log(m) + 1j * math.pi * p
    # homological shifts act structurally: phi moves by the shift and the
    # complex logarithm by i*pi*shift, both exactly
    for name in tracked:
        obj = path.catalog[name]
        if obj.shift == 0:
            continue
        parent = obj.base
        mass[name] = mass[parent]
        phi[name] = phi[parent] + obj.shift
        gap[name] = gap[parent]
        ell[name] = ell[parent] + 1j * (math.pi * obj.shift)

    a_plus = lifts["O_C(0)"]
    a_minus = lifts["O_C(-1)"]
    itinerary = np.where(a_plus > math.pi, "GluedR(0)",
                         np.where(a_minus <= -math.pi, "GluedL(-1)", "WallZone"))
    itinerary = itinerary.astype(object)
    if cfg.family == FAMILY_BOUNDARY:
        itinerary[0] = "CkBoundary(-1)"
    elif cfg.family == FAMILY_W2:
        itinerary[0] = "W2"

    return SampledPath(path=path, ts=ts, g=g, values=values, lifts=lifts,
                       mass=mass, phi=phi, gap=gap, ell=ell, itinerary=itinerary)


@dataclass(frozen=True)
class Trajectory:
    """Sampled charge data of one catalog object along a path."""

    object: str
    ts: np.ndarray
    values: np.ndarray
    arg_lift: np.ndarray
    phi: np.ndarray
    mass: np.ndarray
    ell: np.ndarray

    def to_rows(self):
        for i, t in enumerate(self.ts):
            z = self.values[i]
            yield (t, self.object, z.real, z.imag, float(self.arg_lift[i]),
                   abs(z), float(self.phi[i]), float(np.log(self.mass[i])))


def sample_trajectory(path: PathEvaluator, name: str, horizon: float,
                      grid: int | None = None, names=None) -> Trajectory:
    sp = path.sample(horizon, grid, names=names or (name,))
    return Trajectory(object=name, ts=sp.ts, values=sp.values[name],
                      arg_lift=sp.lifts[name], phi=sp.phi[name],
                      mass=sp.mass[name], ell=sp.ell[name])


CSV_COLUMNS = ("t", "object", "ReZ", "ImZ", "arg_unwrapped", "absZ", "phi", "logm")


def trajectories_csv(path: PathEvaluator, horizon: float, names=None,
                     grid: int | None = None) -> str:
    """Fixed-order CSV of the sampled trajectories (deterministic)."""
    names = tuple(names) if names is not None else DIAGNOSTIC_OBJECTS
    sp = path.sample(horizon, grid, names=names)
    lines = [",".join(CSV_COLUMNS)]
    for name in names:
        traj = Trajectory(object=name, ts=sp.ts, values=sp.values[name],
                          arg_lift=sp.lifts[name], phi=sp.phi[name],
                          mass=sp.mass[name], ell=sp.ell[name])
        for row in traj.to_rows():
            lines.append(",".join(
                x if isinstance(x, str) else format(x, ".17g") for x in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Tail fits
# ---------------------------------------------------------------------------

def _tail_fit(ts, ys):
    """Least-squares line over the samples; returns (slope, intercept, R^2)."""
    A = np.vstack([ts, np.ones_like(ts)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def _tail_monotone_from(diffs: np.ndarray, direction: float) -> int | None:
    """First index from which all differences have the given sign."""
    if direction == 0:
        return None
    good = np.sign(diffs) == math.copysign(1.0, direction)
    if not good[-1]:
        return None
    idx = len(good)
    while idx > 0 and good[idx - 1]:
        idx -= 1
    return idx


def _extrapolate_normalized(ts, xs):
    """Fit ``x(t) = x_inf + a log(t)/t + b/t`` on a tail (componentwise)."""
    A = np.vstack([np.ones_like(ts), np.log(ts) / ts, 1.0 / ts]).T
    coef_re, *_ = np.linalg.lstsq(A, xs.real, rcond=None)
    coef_im, *_ = np.linalg.lstsq(A, xs.imag, rcond=None)
    resid = A @ coef_re - xs.real + 1j * (A @ coef_im - xs.imag)
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    return complex(coef_re[0], coef_im[0]), rms


# ---------------------------------------------------------------------------
# Assumption checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AssumptionReport:
    """Verdicts for the four running assumptions, with numeric evidence."""

    nonvanishing: bool
    monotone_arg: bool
    mass_divergence: bool
    normalized_limit: bool
    evidence: dict

    @property
    def all_hold(self) -> bool:
        return (self.nonvanishing and self.monotone_arg
                and self.mass_divergence and self.normalized_limit)


def check_assumptions(path: PathEvaluator, horizon: float,
                      grid: int | None = None) -> AssumptionReport:
    """Sampled verification of the four path assumptions for ``O_C(-1)``.

    (1) both tracked charges stay away from zero; (2) the unwrapped
    argument of ``Z_t(O_C(-1))`` is monotone with the sign of ``Im lam``
    from some time on, covering at least the last decade, and its tail
    slope matches ``Im lam``; (3) ``log |Z_t(O_C(-1))|`` grows with slope
    ``Re lam`` (for ``Re lam > 0``); (4) the normalized logarithm
    ``ell_t / (1 + |ell_t|)`` stabilizes; its tail extrapolation is
    reported (expected near ``lam/|lam|``).
    """
    sp = path.sample(horizon, grid)
    cfg = path.cfg
    lam = cfg.lam
    tail = sp.last_decade()
    ev = {}

    m_minus = np.min(np.abs(sp.values["O_C(-1)"]))
    m_plus = np.min(np.abs(sp.values["O_C(0)"]))
    scale = max(1.0, abs(sp.values["O_C(-1)"][0]))
    a1 = bool(min(m_minus, m_plus) > 1e-9 * scale)
    ev["min_abs_OCm1"] = float(m_minus)
    ev["min_abs_OC"] = float(m_plus)

    lift = sp.lifts["O_C(-1)"]
    diffs = np.diff(lift)
    idx = _tail_monotone_from(diffs, lam.imag)
    slope = r2 = None
    a2 = False
    if idx is not None and cfg.weight != 0:
        t_mono = sp.ts[idx]
        slope, _, r2 = _tail_fit(sp.ts[tail], lift[tail])
        slope_ok = abs(slope - lam.imag) <= 0.05 * abs(lam.imag) + 1e-3
        a2 = bool(t_mono <= sp.ts[-1] / 10.0 and slope_ok and r2 > 0.999)
        ev["t_monotone_from"] = float(t_mono)
    ev["arg_slope"] = slope
    ev["arg_fit_r2"] = r2

    logs = np.log(np.abs(sp.values["O_C(-1)"]))
    s3, _, r3 = _tail_fit(sp.ts[tail], logs[tail])
    if lam.real > 0:
        a3 = bool(abs(s3 - lam.real) <= 0.05 * abs(lam.real) + 1e-3 and r3 > 0.999)
    else:
        prof = np.abs(sp.g[tail])
        ratio = np.abs(sp.values["O_C(-1)"][tail]) / np.where(prof > 0, prof, 1.0)
        a3 = bool(prof[-1] > 0 and abs(ratio[-1] - 1.0) < 0.05)
    ev["log_abs_slope"] = s3
    ev["log_abs_fit_r2"] = r3

    ell = sp.ell["O_C(-1)"]
    x = ell / (1.0 + np.abs(ell))
    limit, rms = _extrapolate_normalized(sp.ts[tail], x[tail])
    a4 = bool(rms < 1e-3)
    ev["ell_normalized_limit"] = limit
    ev["ell_normalized_fit_rms"] = rms
    ev["ell_normalized_last"] = complex(x[-1])
    ev["lam_unit"] = lam / abs(lam) if lam != 0 else None

    return AssumptionReport(a1, a2, a3, a4, ev)


# ---------------------------------------------------------------------------
# Quasi-convergence report
# ---------------------------------------------------------------------------

SIM_CAUCHY_TOL = 1e-3
SIMI_SLOPE_TOL = 5e-3
PREC_MIN_GROWTH = 0.3
LIMIT_SS_TOL = 1e-6


@dataclass
class QcReport:
    """Per-object verdicts, pairwise relations, and the induced label."""

    objects: list
    limit_semistable: dict
    gap_tail: dict
    relations: dict  # (E, F) -> {"prec": bool, "sim_i": bool, "sim": bool, ...}
    sim_equals_sim_i: bool
    itinerary_final: str
    itinerary_stable: bool
    conclusive: bool
    cert_decreasing: dict
    cert_increasing: dict
    evidence: dict = field(default_factory=dict)

    def relation(self, E: str, F: str) -> str:
        r = self.relations[(E, F)]
        if r["prec"]:
            return "prec"
        if self.relations[(F, E)]["prec"]:
            return "succ"
        if r["sim"]:
            return "sim"
        if r["sim_i"]:
            return "sim_i"
        return "incomparable"

    def to_json(self) -> str:
        rel = {f"{e}|{f}": self.relation(e, f)
               for (e, f) in self.relations if e < f}
        payload = {
            "objects": self.objects,
            "limit_semistable": self.limit_semistable,
            "gap_tail": {k: float(v) for k, v in self.gap_tail.items()},
            "relations": rel,
            "sim_equals_sim_i": self.sim_equals_sim_i,
            "itinerary_final": self.itinerary_final,
            "itinerary_stable": self.itinerary_stable,
            "conclusive": self.conclusive,
            "cert_decreasing": self.cert_decreasing,
            "cert_increasing": self.cert_increasing,
        }
        return json.dumps(payload, sort_keys=True)


DIAGNOSTIC_OBJECTS = ("O_C(-1)", "O_C(0)", "O_C(-1)[1]", "O_C(-1)[2]",
                      "O_x_onC", "O_x_offC", "f*O_y", "f*O_Y", "f*L")


def quasi_convergence_report(path: PathEvaluator, horizon: float,
                             objects=DIAGNOSTIC_OBJECTS,
                             grid: int | None = None) -> QcReport:
    """Limit-semistability, pairwise relations, and induced-SOD evidence.

    Objects are compared through the declared HN model: ``prec`` when the
    phase gap grows with a significantly positive fitted slope, ``sim_i``
    when the gap slope vanishes within tolerance, ``sim`` when the raw
    ``ell``-difference is Cauchy over the last decade.  On the catalog the
    two equivalence notions must agree; a mismatch is reported as a
    failure rather than silently repaired.
    """
    sp = path.sample(horizon, grid, names=objects)
    tail = sp.last_decade()
    ts_tail = sp.ts[tail]
    objects = [o for o in objects if o in sp.values]

    final = str(sp.itinerary[-1])
    stable = bool(np.all(sp.itinerary[tail] == final))
    if not (stable and final in ("GluedR(0)", "GluedL(-1)")):
        raise InconclusiveError(
            f"itinerary does not stabilize in a glued region by horizon "
            f"{horizon} (final sample label: {final})")

    limit_ss, gap_tail = {}, {}
    for name in objects:
        g = float(np.max(sp.gap[name][tail]))
        gap_tail[name] = g
        limit_ss[name] = bool(g < LIMIT_SS_TOL)

    relations = {}
    for E in objects:
        for F in objects:
            if E == F:
                continue
            dphi = sp.phi[F][tail] - sp.phi[E][tail]
            slope, _, _ = _tail_fit(ts_tail, dphi)
            growth = float(dphi[-1] - dphi[0])
            prec = bool(slope > SIMI_SLOPE_TOL and growth > PREC_MIN_GROWTH)
            sim_i = bool(abs(slope) <= SIMI_SLOPE_TOL)
            dell = sp.ell[E][tail] - sp.ell[F][tail]
            cauchy = float(np.max(np.abs(dell - dell[-1])))
            sim = bool(cauchy < SIM_CAUCHY_TOL)
            relations[(E, F)] = {"prec": prec, "sim_i": sim_i, "sim": sim,
                                 "phase_slope": slope, "phase_growth": growth,
                                 "ell_cauchy_tail": cauchy}

    mismatches = [pair for pair, r in relations.items() if r["sim"] != r["sim_i"]]
    sim_eq = not mismatches

    cert_dec, cert_inc = {}, {}
    for name in objects:
        if not name.startswith("O_C("):
            continue
        lift = sp.lifts[name]
        idx = _tail_monotone_from(np.diff(lift), path.cfg.lam.imag)
        slope, _, r2 = _tail_fit(ts_tail, lift[tail])
        ok = (idx is not None and sp.ts[idx] <= sp.ts[-1] / 10.0
              and r2 > 0.999
              and abs(slope - path.cfg.lam.imag) <= 0.05 * abs(path.cfg.lam.imag) + 1e-3)
        if ok and slope < -SIMI_SLOPE_TOL:
            cert_dec[name] = {"slope": slope, "r2": r2}
        if ok and slope > SIMI_SLOPE_TOL:
            cert_inc[name] = {"slope": slope, "r2": r2}

    conclusive = bool(stable and (cert_dec or cert_inc) and sim_eq)
    return QcReport(objects=objects, limit_semistable=limit_ss,
                    gap_tail=gap_tail, relations=relations,
                    sim_equals_sim_i=sim_eq, itinerary_final=final,
                    itinerary_stable=stable, conclusive=conclusive,
                    cert_decreasing=cert_dec, cert_increasing=cert_inc,
                    evidence={"mismatched_pairs": mismatches})


def induced_sod(report: QcReport, k: int = -1):
    """Decomposition induced by the path, from the monotonicity evidence.

    Decreasing-divergent ``arg Z_t(O_C(k))`` yields the label with
    ``O_C(k)`` on the left; increasing-divergent ``arg Z_t(O_C(k+1))``
    yields the label with ``O_C(k+1)`` on the right.
    """
    from .sod import EXC_LEFT, EXC_RIGHT, SodLabel

    if not report.conclusive:
        raise InconclusiveError("report is not conclusive")
    name_k = f"O_C({k})"
    name_k1 = f"O_C({k + 1})"
    if name_k in report.cert_decreasing:
        return SodLabel(EXC_LEFT, k)
    if name_k1 in report.cert_increasing:
        return SodLabel(EXC_RIGHT, k + 1)
    raise InconclusiveError(
        f"no monotonicity certificate for O_C({k}) or O_C({k + 1})")


# ---------------------------------------------------------------------------
# Geometric extension of boundary starts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionCertificate:
    eps: float
    n_checked: int
    min_im: float
    holds: bool


class ExtensionError(RuntimeError):
    """The positivity certificate failed down to the smallest step."""


def extend_into_geometric(path: PathEvaluator, eps: float,
                          n_grid: int = 512) -> ExtensionCertificate:
    """Certify ``Im Z_t(O_C(-1)) > 0`` on ``[T0 - eps, T0)``.

    The boundary-family charge extends to earlier times by the same
    formula; positivity of the imaginary part on the pre-interval is the
    geometric-side evidence.  ``eps`` is halved until the sampled
    certificate holds or a floor is reached.
    """
    if path.cfg.family != FAMILY_BOUNDARY:
        raise ValueError("geometric extension applies to boundary starts")
    if eps == 0:
        return ExtensionCertificate(0.0, 0, math.inf, True)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    T0 = path.cfg.T0
    v = path.catalog["O_C(-1)"].chern
    floor = eps * 2.0 ** -20
    cur = min(eps, 0.9 * T0)
    while cur >= floor:
        ts = np.linspace(T0 - cur, T0, n_grid, endpoint=False)
        ims = np.array([path.value_at(t, v, allow_extension=True).imag for t in ts])
        if np.all(ims > 0):
            return ExtensionCertificate(float(cur), len(ts), float(ims.min()), True)
        cur /= 2.0
    raise ExtensionError(
        f"Im Z_t(O_C(-1)) not positive on any [T0 - eps, T0) down to eps = {floor}")
