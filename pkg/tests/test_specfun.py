"""Exponential integral against an independent quadrature oracle."""

import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from blowup_paths.specfun import (
    EiDomainError,
    ThresholdNotFound,
    continuous_argument,
    ei,
    ei_derivative,
    ei_value,
    find_T0,
)

EULER_GAMMA = 0.5772156649015328606


def quadrature_pv_oracle(z: complex) -> complex:
    """Ei via adaptive quadrature of the regularized defining integral.

    Collapsing the principal-value prescription of
    ``-int_{-z}^{inf} e^{-t}/t dt`` against the logarithmic head gives
    ``Ei(z) = gamma + Log z + int_0^1 (e^{zu} - 1)/u du`` with an entire
    integrand; on the negative axis the real logarithm yields the
    principal value.
    """
    re = quad(lambda u: ((np.exp(z * u) - 1) / u).real if u > 0 else z.real,
              0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    im = quad(lambda u: ((np.exp(z * u) - 1) / u).imag if u > 0 else z.imag,
              0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    if z.imag == 0 and z.real < 0:
        head = EULER_GAMMA + math.log(-z.real)
    else:
        head = EULER_GAMMA + cmath.log(z)
    return head + complex(re, im)


def sample_points(n, rmin=0.1, rmax=50.0, seed=0):
    rng = np.random.default_rng(seed)
    rs = 10 ** rng.uniform(math.log10(rmin), math.log10(rmax), n)
    ths = rng.uniform(-math.pi, math.pi, n)
    return [complex(r * math.cos(t), r * math.sin(t)) for r, t in zip(rs, ths)]


class TestEiOracle:
    def test_known_value_at_one(self):
        assert abs(ei_value(1.0) - 1.8951178163559368) < 1e-14

    def test_oracle_agreement_200_points(self):
        for z in sample_points(200):
            v = ei(z)
            ref = quadrature_pv_oracle(z)
            assert abs(v.value - ref) < 1e-10 * (1 + abs(ref)), (z, v.regime)

    def test_est_error_is_upper_bound(self):
        for z in sample_points(120, seed=7):
            v = ei(z)
            ref = quadrature_pv_oracle(z)
            assert abs(v.value - ref) <= v.est_error + 1e-13 * (1 + abs(ref))

    def test_regimes(self):
        assert ei(3 + 1j).regime == "series"
        assert ei(80 + 3j).regime == "asymptotic"
        assert ei(-2.5).regime == "pv-real"
        assert ei(-45.0).regime == "pv-real"

    def test_pv_on_negative_axis_is_real(self):
        for x in (-0.1, -1.0, -17.3, -44.0):
            v = ei_value(x)
            assert v.imag == 0.0
            assert abs(v - quadrature_pv_oracle(complex(x))) < 1e-12

    def test_schwarz_reflection(self):
        z = 2 + 3j
        assert ei_value(z.conjugate()) == ei_value(z).conjugate()

    def test_zero_rejected(self):
        with pytest.raises(EiDomainError):
            ei(0)

    def test_branch_continuity_along_paths(self):
        # arcs crossing the positive axis and, at radius 45, the asymptotic
        # regime; steps sized so |dz| <= 0.05 keep relative jumps small
        for radius in (8.0, 39.9, 45.0):
            n = max(400, int(radius * 2 * math.pi / 0.05))
            ths = np.linspace(-0.95 * math.pi, 0.95 * math.pi, n)
            vals = np.array([ei_value(radius * cmath.exp(1j * t)) for t in ths])
            rel_jumps = np.abs(np.diff(vals)) / (1 + np.abs(vals[:-1]))
            assert np.max(rel_jumps) < 0.11

    def test_overlap_band_series_vs_asymptotic(self):
        # both regimes evaluated explicitly inside the [30, 60] band
        from blowup_paths.specfun import _asymptotic, _series_exact

        rng = np.random.default_rng(3)
        for _ in range(40):
            r = rng.uniform(30.0, 60.0)
            th = rng.uniform(-math.pi * 0.98, math.pi * 0.98)
            z = complex(r * math.cos(th), r * math.sin(th))
            s, _ = _asymptotic(z)
            asym = cmath.exp(z) / z * s
            if z.imag > 0:
                asym += 1j * math.pi
            elif z.imag < 0:
                asym -= 1j * math.pi
            series = EULER_GAMMA + cmath.log(z) + _series_exact(z)
            assert abs(series - asym) < 1e-11 * (1 + abs(series))


class TestAsymptoticRatio:
    def test_ratio_bound_along_rays(self):
        # |Ei(z) z e^{-z} - 1| <= 2/|z| in the Re-dominant cone where the
        # Stokes constant i*pi is exponentially subdominant
        for lam in (1 + 0.5j, 1 - 0.5j, 2 + 1j, 2 - 1j):
            for target in (30.0, 100.0, 300.0):
                t = target / abs(lam)
                z = lam * t
                ratio = ei_value(z) * z * cmath.exp(-z)
                assert abs(ratio - 1) <= 2.0 / abs(z), (lam, target)

    def test_stokes_constant_on_imaginary_axis(self):
        # on i*R the expansion's leading content is the constant i*pi
        z = 30j
        tail = ei_value(z) - 1j * math.pi
        ref = cmath.exp(z) / z * (1 + 1 / z + 2 / z ** 2)
        assert abs(tail - ref) < 3e-4 * abs(ref)


class TestDerivative:
    def test_formula_values(self):
        assert abs(ei_derivative(1.0, 1.0) - math.e) < 1e-15
        assert abs(ei_derivative(1j, math.pi) - (-1 / math.pi)) < 1e-15

    def test_central_difference_oracle(self):
        lam = 1.3 - 0.4j
        t = 2.7
        errs = []
        for h in (1e-3, 5e-4):
            fd = (ei_value(lam * (t + h)) - ei_value(lam * (t - h))) / (2 * h)
            errs.append(abs(fd - ei_derivative(lam, t)))
        assert errs[0] < 1e-5
        # O(h^2): quartering expected when h halves
        assert errs[1] < 0.3 * errs[0]

    def test_requires_positive_t(self):
        with pytest.raises(ValueError):
            ei_derivative(1.0, -2.0)


class TestFindT0:
    def test_box_with_zero_rejected(self):
        with pytest.raises(ValueError):
            find_T0((-1, 1, -1, 1), 1.0)

    def test_degenerate_real_point(self):
        T0 = find_T0(1.0, 1.0)
        assert T0 < 1.6
        ts = np.geomspace(T0, 100 * T0, 300)
        assert all(ei_value(t).real > 1.0 for t in ts)

    def test_box_threshold_validated_on_dense_grid(self):
        T0 = find_T0((1, 2, 0.5, 1), 1.0)
        for re in np.linspace(1, 2, 8):
            for im in np.linspace(0.5, 1, 8):
                lam = complex(re, im)
                ts = np.geomspace(T0, 100 * T0, 250)
                vals = np.array([ei_value(lam * t) for t in ts])
                assert np.all(np.abs(vals) > 1.0)
                args = continuous_argument(vals)
                assert np.all(np.diff(args) > 0)

    def test_monotone_sign_flips_under_conjugation(self):
        T0 = find_T0(1 + 0.7j, 1.0)
        ts = np.geomspace(T0, 30 * T0, 200)
        up = continuous_argument([ei_value((1 + 0.7j) * t) for t in ts])
        down = continuous_argument([ei_value((1 - 0.7j) * t) for t in ts])
        assert np.all(np.diff(up) > 0) and np.all(np.diff(down) < 0)

    def test_pathological_box_raises(self):
        with pytest.raises(ThresholdNotFound):
            find_T0((-2, -1, 0.4, 0.8), 1.0, t_cap=1e4)


class TestContinuousArgument:
    def test_linear_winding(self):
        ts = np.linspace(0, 20, 2000)
        vals = np.exp(1j * 1.7 * ts)
        args = continuous_argument(vals)
        assert abs(args[-1] - 1.7 * 20) < 1e-9

    def test_start_offset_must_be_compatible(self):
        vals = np.exp(1j * np.linspace(0.3, 2.0, 50))
        shifted = continuous_argument(vals, start=0.3 + 4 * math.pi)
        assert abs(shifted[0] - (0.3 + 4 * math.pi)) < 1e-12
        with pytest.raises(ValueError):
            continuous_argument(vals, start=1.0)
