"""Truncated quantum differential equation of a one-point blowup.

For a class written as ``xi = (xi0, xi1 + nu*C, xi2)`` with ``xi1`` in the
``K_Y``-line splitting ``xi1 = a*K_Y + D`` (``K_Y . D = 0``), the system is

    xi0' = 0
    t a'  = xi0 / z                      (projection of t xi1' = K_Y xi0 / z)
    D'   = 0
    t nu' = (xi0 + q t nu) / z
    t xi2' = (K_Y^2 a - nu) / z

with ``q = e^{-psi.C}`` and ``z`` the spectral parameter.  The system is
smooth in ``u = log t``, which is the variable used by the integrator.

Along any solution, ``g(t) := t xi2' = (K_Y^2 a - nu)/z`` satisfies

    t g' = (1/z^2) { (K_Y^2 - 1) C0
                     + q t ( -(K_Y^2 C0 / z) log t + c1 )
                     + q z t g }

where ``C0 = xi0`` and ``c1 = -K_Y^2 a(1)``; the trailing ``z`` is required
for the identity to hold at ``z != 1`` (substituting ``nu = K_Y^2 a - z t
xi2'`` into ``t nu'`` carries it along).  ``second_order_residual``
certifies this reduction on a trajectory.  With ``C0 = C1 = 0`` and
``z = 1`` the reduction collapses to ``(t Z')' = q t Z'`` whose general
solution is the exponential-integral pencil ``Z = a Ei(q t) + b``.

If ``K_Y = 0`` the ``a``-component is vacuous (``xi1 = D`` is constant and
``K_Y^2 a`` vanishes identically); it is carried along with no effect.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .lattice import ChernClass, SurfaceModel
from .specfun import ei_value


class StiffnessError(RuntimeError):
    """Step-size underflow inside the adaptive integrator."""


def q_from_psi_c(psi_dot_c: complex) -> complex:
    """``q = e^{-psi.C}`` from the complexified Kaehler pairing with C."""
    return cmath.exp(-psi_dot_c)


@dataclass(frozen=True)
class QdeParams:
    """Parameters of the truncated system.

    ``abs(q) <= 1`` is the geometric regime (``0 < omega.C < 1``); it is
    not enforced because the Ei-pencil solutions are meaningful for any
    ``q`` and the closed-form checks sweep ``|q|`` up to ~2.
    """

    z: complex
    q: complex
    KY2: float = 0.0
    C0: complex = 0.0
    C1_KY: complex = 0.0

    def __post_init__(self):
        if self.z == 0:
            raise ValueError("spectral parameter z must be nonzero")


@dataclass(frozen=True)
class QdeState:
    """State ``(xi0, a, D, nu, xi2)``; ``xi0`` and ``D`` are constants."""

    xi0: complex
    a: complex
    D: tuple
    nu: complex
    xi2: complex

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(complex(x) for x in self.D))


def qde_rhs(state: QdeState, t: float, p: QdeParams) -> QdeState:
    """Right-hand side ``d(state)/dt`` of the first-order system."""
    if t <= 0:
        raise ValueError("the system is defined for t > 0")
    zt = p.z * t
    return QdeState(
        xi0=0.0,
        a=state.xi0 / zt,
        D=(0.0,) * len(state.D),
        nu=(state.xi0 + p.q * t * state.nu) / zt,
        xi2=(p.KY2 * state.a - state.nu) / zt,
    )


@dataclass(frozen=True)
class QdeTrajectory:
    """Sampled trajectory with an optional dense evaluator in ``log t``.

    ``evaluator(u)`` returns the complex triple ``(a, nu, xi2)`` at
    ``t = e^u``; integrated trajectories expose the solver's dense output,
    closed-form ones an analytic map.  ``xi0`` and ``D`` are stored once,
    never integrated.
    """

    params: QdeParams
    ts: np.ndarray
    xi0: complex
    D: tuple
    a: np.ndarray
    nu: np.ndarray
    xi2: np.ndarray
    tol: float
    kind: str = "integrated"
    evaluator: Callable | None = field(default=None, compare=False, repr=False)

    def to_csv(self) -> str:
        header = ["t", "re_xi0", "im_xi0", "re_a", "im_a"]
        for i in range(len(self.D)):
            header += [f"re_D{i}", f"im_D{i}"]
        header += ["re_nu", "im_nu", "re_xi2", "im_xi2"]
        lines = [",".join(header)]
        for i, t in enumerate(self.ts):
            row = [t, self.xi0.real, self.xi0.imag, self.a[i].real, self.a[i].imag]
            for dcomp in self.D:
                row += [dcomp.real, dcomp.imag]
            row += [self.nu[i].real, self.nu[i].imag,
                    self.xi2[i].real, self.xi2[i].imag]
            lines.append(",".join(format(x, ".17g") for x in row))
        return "\n".join(lines) + "\n"


def integrate(p: QdeParams, init: QdeState, t0: float, t1: float,
              tol: float = 1e-10, n_samples: int = 257,
              method: str = "RK45") -> QdeTrajectory:
    """Adaptive embedded Runge-Kutta integration of ``(a, nu, xi2)``.

    Uses the substitution ``u = log t`` (the system is smooth there) and
    returns a geometrically sampled trajectory with dense output.  Local
    error is controlled at ``tol``; a step-size underflow surfaces as
    :class:`StiffnessError`.  The default method is Dormand-Prince RK45;
    the residual certificate re-integrates with the higher-order DOP853.
    """
    if not (0 < t0 < t1):
        raise ValueError("need 0 < t0 < t1")
    if tol <= 0:
        raise ValueError("tol must be positive")

    xi0 = complex(init.xi0)

    def rhs(u, y):
        a = complex(y[0], y[1])
        nu = complex(y[2], y[3])
        t = math.exp(u)
        da = xi0 / p.z
        dnu = (xi0 + p.q * t * nu) / p.z
        dx2 = (p.KY2 * a - nu) / p.z
        return [da.real, da.imag, dnu.real, dnu.imag, dx2.real, dx2.imag]

    y0 = [init.a.real, init.a.imag, init.nu.real, init.nu.imag,
          init.xi2.real, init.xi2.imag]
    sol = solve_ivp(rhs, (math.log(t0), math.log(t1)), y0, method=method,
                    rtol=tol, atol=tol, dense_output=True)
    if not sol.success:
        raise StiffnessError(sol.message)

    def evaluator(u):
        y = sol.sol(u)
        return (complex(y[0], y[1]), complex(y[2], y[3]), complex(y[4], y[5]))

    ts = np.geomspace(t0, t1, n_samples)
    us = np.log(ts)
    ys = sol.sol(us)
    return QdeTrajectory(
        params=p, ts=ts, xi0=xi0, D=init.D,
        a=ys[0] + 1j * ys[1], nu=ys[2] + 1j * ys[3], xi2=ys[4] + 1j * ys[5],
        tol=tol, kind="integrated", evaluator=evaluator,
    )


# ---------------------------------------------------------------------------
# Closed-form Ei pencil
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormCharge:
    """``Z(t) = a Ei(lam t) + b`` with its exact derivative."""

    a: complex
    b: complex
    lam: complex

    def __call__(self, t: float) -> complex:
        return self.a * ei_value(self.lam * t) + self.b

    def derivative(self, t: float) -> complex:
        return self.a * cmath.exp(self.lam * t) / t


def closed_form(a: complex, b: complex, lam: complex) -> ClosedFormCharge:
    return ClosedFormCharge(a, b, lam)


def closed_form_trajectory(a: complex, b: complex, lam: complex, t0: float,
                           t1: float, n_samples: int = 257) -> QdeTrajectory:
    """The Ei-pencil solution as a trajectory (``z = 1``, ``q = lam``).

    State bookkeeping: ``xi0 = 0``, ``a = 0``, ``nu = -a_coef e^{lam t}``,
    ``xi2 = a_coef Ei(lam t) + b``.
    """
    cf = closed_form(a, b, lam)
    p = QdeParams(z=1.0, q=lam)

    def evaluator(u):
        t = math.exp(u)
        return (0.0 + 0.0j, -a * cmath.exp(lam * t), cf(t))

    ts = np.geomspace(t0, t1, n_samples)
    nu = np.array([-a * cmath.exp(lam * t) for t in ts])
    xi2 = np.array([cf(t) for t in ts])
    return QdeTrajectory(
        params=p, ts=ts, xi0=0.0, D=(), a=np.zeros_like(nu), nu=nu, xi2=xi2,
        tol=1e-14, kind="closed-form", evaluator=evaluator,
    )


# ---------------------------------------------------------------------------
# Second-order reduction certificate
# ---------------------------------------------------------------------------

def second_order_residual(traj: QdeTrajectory, p: QdeParams | None = None,
                          refine: float = 1e-4) -> float:
    """Sup-norm defect of the second-order reduction along a trajectory.

    ``g := t xi2' = (K_Y^2 a - nu)/z`` is evaluated from the trajectory's
    own ``a`` and ``nu``; its log-time derivative ``t g'`` comes from a
    five-point stencil on a dense evaluator (the trajectory's analytic one
    when present, otherwise an independent high-order re-integration at
    ``refine * tol``).  The constants are the trajectory's own: ``C0 =
    xi0`` and ``c1 = -K_Y^2 a(1)`` extrapolated from the first sample.
    """
    if len(traj.ts) < 5:
        raise ValueError("need at least 5 samples for second differences")
    p = traj.params if p is None else p

    if traj.evaluator is not None and traj.kind == "closed-form":
        dense = traj.evaluator
    else:
        state0 = QdeState(xi0=traj.xi0, a=traj.a[0], D=traj.D, nu=traj.nu[0],
                          xi2=traj.xi2[0])
        ref = integrate(p, state0, traj.ts[0], traj.ts[-1],
                        tol=max(1e-13, traj.tol * refine), method="DOP853")
        dense = ref.evaluator

    def g_of(u):
        a, nu, _ = dense(u)
        return (p.KY2 * a - nu) / p.z

    c0 = traj.xi0
    u0 = math.log(traj.ts[0])
    a1 = dense(u0)[0] - (c0 / p.z) * u0
    c1 = -p.KY2 * a1

    h = 3e-4
    us = np.log(traj.ts)
    lo, hi = us[0] + 2 * h, us[-1] - 2 * h
    worst = 0.0
    for u in us:
        if not (lo <= u <= hi):
            continue
        t = math.exp(u)
        gm2, gm1, g0, gp1, gp2 = (g_of(u - 2 * h), g_of(u - h), g_of(u),
                                  g_of(u + h), g_of(u + 2 * h))
        tgprime = (8 * (gp1 - gm1) - (gp2 - gm2)) / (12 * h)
        rhs = ((p.KY2 - 1) * c0
               + p.q * t * (-(p.KY2 * c0 / p.z) * math.log(t) + c1)
               + p.q * p.z * t * g0) / (p.z * p.z)
        worst = max(worst, abs(tgprime - rhs))
    return worst


# ---------------------------------------------------------------------------
# Blowup quantum corrections (the only Gromov-Witten input that survives)
# ---------------------------------------------------------------------------

def gw_correction(model: SurfaceModel, n: int, v: ChernClass) -> ChernClass:
    """``T_{nC}`` acting on a lattice class.

    The only curve classes contracted by the blowup are the multiples of
    ``C``, and the corresponding corrections collapse to two facts:
    ``T_{nC} = 0`` for ``n != 1``, and ``T_C`` kills the pullback of
    ``H^*(Y)`` while sending ``C`` to ``-C``.
    """
    zero = ChernClass.zero(model.rho)
    if n != 1:
        return zero
    return ChernClass(zero.r, zero.d, -v.e, zero.c2)
