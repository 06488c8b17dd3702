"""Spectral-core unit tests: closed forms, quadrature oracles, invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autoconv.spectral import (
    FourierCoefficients,
    OddChannelKernel,
    autoconvolution_curve,
    build_coefficients,
    gradient,
    objective,
    objective_tail_bound,
    odd_channel,
    period2_spectrum,
    threefold_flatness,
)
from autoconv.util import csum

from conftest import REF20, conv_direct, conv_sq_integral, rng_coeffs

PI4 = math.pi ** 4
BOX = build_coefficients([])


class TestBuildCoefficients:
    def test_empty_is_constant_one(self):
        assert BOX.T == 0
        assert BOX.coeff(0) == 1.0
        assert BOX.coeff(3) == 0.0
        assert np.allclose(BOX.evaluate([0.0, 0.3]), 1.0)

    def test_ref20_roundtrip(self):
        f = build_coefficients(REF20)
        assert f.T == 20
        assert f.coeff(1) == REF20[0]
        assert f.coeff(-7) == REF20[6]
        assert f.coeff(21) == 0.0

    def test_nan_rejected_with_index(self):
        with pytest.raises(ValueError, match="index 1"):
            build_coefficients([float("nan")])
        with pytest.raises(ValueError, match="index 3"):
            build_coefficients([0.0, 0.1, float("inf")])

    def test_values_read_only(self):
        f = build_coefficients([0.25])
        with pytest.raises(ValueError):
            f.values[0] = 1.0


class TestOddChannel:
    def test_box_empty_sum(self):
        assert odd_channel(BOX, 3) == pytest.approx(1.0 / 5.0, abs=0)

    def test_two_term_hand_value(self):
        f = build_coefficients([-0.5])
        # 1 + 2*1*(-0.5)*(-1)/(1-4) = 2/3
        assert odd_channel(f, 1) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_matches_quadrature_spectrum(self, ref20):
        # the first odd channel is pi * F_hat(1); compute F_hat(1) by
        # direct quadrature of (1/2) * integral of cos(pi x) f(x)
        nodes, weights = np.polynomial.legendre.leggauss(400)
        x = 0.5 * nodes
        from conftest import eval_f
        fh1 = 0.5 * 0.5 * float(np.dot(weights, np.cos(math.pi * x) * eval_f(ref20, x)))
        assert odd_channel(ref20, 1) == pytest.approx(math.pi * fh1, abs=1e-10)

    def test_rejects_nonpositive_m(self):
        with pytest.raises(ValueError):
            odd_channel(BOX, 0)


class TestObjective:
    def test_box_closed_form(self):
        # exact limit 2/3; finite-R value is below by the positive tail
        br = objective(BOX, 200_000)
        assert br.total < 2.0 / 3.0
        tail = (16.0 / PI4) * (math.pi ** 4 / 96.0
                               - csum((2.0 * np.arange(1, 200_001) - 1.0) ** -4.0))
        assert br.total + tail == pytest.approx(2.0 / 3.0, abs=1e-13)

    def test_breakdown_identity_and_signs(self, ref20):
        br = objective(ref20, 500)
        assert br.even_sum >= 0 and br.odd_sum >= 0
        assert br.total == 0.5 + br.even_sum + br.odd_sum
        assert br.total >= 0.5

    def test_monotone_in_R(self, ref20):
        totals = [objective(ref20, R).total for R in (10, 100, 1000, 5000)]
        assert all(a <= b for a, b in zip(totals, totals[1:]))

    def test_quadrature_oracle_ref20(self, ref20):
        br = objective(ref20, 4000)
        tail = objective_tail_bound(ref20, 4000)
        oracle = conv_sq_integral(ref20)
        assert br.total + 0.5 * tail == pytest.approx(oracle, abs=1e-8 + tail)

    def test_quadrature_oracle_random(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            f = rng_coeffs(rng, int(rng.integers(1, 12)), 0.4)
            br = objective(f, 30_000)
            assert br.total == pytest.approx(conv_sq_integral(f), abs=1e-7)

    def test_overflow_rejected(self):
        f = build_coefficients([1e90])
        with pytest.raises(OverflowError):
            objective(f, 10)

    def test_kernel_cache_matches_streaming(self, ref20):
        cached = OddChannelKernel(ref20.T, 9000, cache=True)
        a = objective(ref20, 9000, kernel=cached).total
        b = objective(ref20, 9000).total
        assert a == b  # bit-identical across memory modes


class TestGradient:
    def _fd(self, f, R, h=1e-5):
        g = np.empty(f.T)
        base = f.values.copy()
        for j in range(f.T):
            up, dn = base.copy(), base.copy()
            up[j] += h
            dn[j] -= h
            g[j] = (objective(build_coefficients(up), R).total
                    - objective(build_coefficients(dn), R).total) / (2 * h)
        return g

    def test_zero_vector_T5(self):
        f = build_coefficients(np.zeros(5))
        g = gradient(f, 2000)
        fd = self._fd(f, 2000)
        assert np.max(np.abs(g - fd) / np.maximum(np.abs(fd), 1e-12)) < 1e-6

    def test_ref20_fd_agreement(self, ref20):
        g = gradient(ref20, 1500)
        fd = self._fd(ref20, 1500)
        rel = np.abs(g - fd) / np.maximum.reduce(
            [np.abs(g), np.abs(fd), np.full_like(g, 1e-8)])
        assert float(rel.max()) <= 1e-6

    def test_random_points(self):
        rng = np.random.default_rng(11)
        for _ in range(6):
            f = rng_coeffs(rng, 8, 0.5)
            g = gradient(f, 800)
            fd = self._fd(f, 800)
            rel = np.abs(g - fd) / np.maximum.reduce(
                [np.abs(g), np.abs(fd), np.full_like(g, 1e-8)])
            assert float(rel.max()) <= 1e-6


class TestPeriodTwoSpectrum:
    def test_box_closed_form(self):
        sp = period2_spectrum(BOX, 7)
        assert sp[0] == 0.5
        assert sp[1] == pytest.approx(1.0 / math.pi, rel=1e-15)
        assert sp[2] == 0.0
        assert sp[3] == pytest.approx(-1.0 / (3.0 * math.pi), rel=1e-15)
        assert sp[-5] == sp[5]

    def test_even_coeffs_halved(self, ref20):
        sp = period2_spectrum(ref20, 60)
        for k in (1, 4, 20):
            assert sp[2 * k] == 0.5 * ref20.coeff(k)
        assert sp[42] == 0.0  # beyond 2T

    def test_parseval_consistency(self, ref20):
        # 8 * sum |F_hat|^4 over |m| <= 20 T reproduces the objective
        M = 20 * ref20.T
        sp = period2_spectrum(ref20, M)
        spectral_total = 8.0 * sp.power_sum(4.0)
        br = objective(ref20, 4000)
        C = ref20.decay_constant()
        # spectrum covers odd channels j <= (M+1)/2 = 10T; bound the gap
        jM = (M + 1) // 2
        gap = 16.0 * C ** 4 * ((2.0 * jM - 1.0) ** -3) / 6.0 * 8.0
        assert abs(br.total - spectral_total) <= gap + 1e-8

    def test_decay_bound_at_large_odd_m(self, ref20):
        sp = period2_spectrum(ref20, 4001)
        C = ref20.decay_constant()
        assert abs(sp[4001]) <= C / 4001.0


class TestAutoconvolutionCurve:
    def test_box_is_tent(self):
        x = np.linspace(-1, 1, 1001)
        curve = autoconvolution_curve(BOX, x)
        assert np.max(np.abs(curve - (1.0 - np.abs(x)))) < 1e-14

    def test_single_mode_closed_form(self):
        a = 0.37
        f = build_coefficients([a])
        vals = autoconvolution_curve(f, [0.0, 0.5, 1.0])
        assert vals[0] == pytest.approx(1.0 + 2.0 * a * a, rel=1e-13)
        assert vals[1] == pytest.approx(0.5 - a * a, rel=1e-13)
        assert vals[2] == pytest.approx(0.0, abs=1e-13)

    def test_matches_direct_convolution(self, ref20):
        for x in (0.0, 0.13, 0.5, 0.77, 0.99):
            assert autoconvolution_curve(ref20, [x])[0] == pytest.approx(
                conv_direct(ref20, x), abs=1e-10)

    def test_symmetry_exact(self, ref20):
        x = np.linspace(0.0, 1.0, 257)
        plus = autoconvolution_curve(ref20, x)
        minus = autoconvolution_curve(ref20, -x)
        assert np.array_equal(plus, minus)

    def test_mass_conserved(self, ref20):
        x = np.linspace(-1, 1, 20001)
        curve = autoconvolution_curve(ref20, x)
        assert np.trapz(curve, x) == pytest.approx(1.0, abs=1e-6)

    def test_matches_truncated_spectral_sum(self, ref20):
        # the exact curve and the truncated spectral series must agree
        # within the analytic tail of the series
        M = 20001
        sp = period2_spectrum(ref20, M)
        x = np.array([0.0, 0.31, 0.62])
        m = np.arange(-M, M + 1)
        series = (2.0 * sp.coeffs ** 2 *
                  np.exp(1j * math.pi * np.outer(x, m))).sum(axis=1).real
        C = ref20.decay_constant()
        tail = 4.0 * C ** 2 / M
        assert np.max(np.abs(series - autoconvolution_curve(ref20, x))) <= tail

    def test_grid_validated(self):
        with pytest.raises(ValueError):
            autoconvolution_curve(BOX, [1.5])


class TestThreefoldFlatness:
    def test_box_value_at_zero(self):
        rep = threefold_flatness(BOX, 2.0 / 3.0, [0.0])
        assert rep.values[0] == pytest.approx(0.75, abs=1e-9)
        assert rep.target == pytest.approx(1.0 / 6.0)
        assert rep.max_deviation == pytest.approx(0.75 - 1.0 / 6.0, abs=1e-9)

    def test_grid_validated(self):
        with pytest.raises(ValueError):
            threefold_flatness(BOX, 0.6, [0.5])
        with pytest.raises(ValueError):
            threefold_flatness(BOX, -0.1, [0.0])

    def test_max_deviation_definition(self, ref20):
        grid = np.linspace(-0.4, 0.4, 41)
        br = objective(ref20, 2000)
        rep = threefold_flatness(ref20, br.total, grid)
        assert rep.max_deviation == float(np.max(np.abs(rep.values - rep.target)))
        assert rep.tail_budget < 1e-8


class TestConvexityAndProperties:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 5), st.floats(0.01, 0.99), st.integers(0, 2 ** 31 - 1))
    def test_convexity_probe(self, T, lam, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(-1, 1, T)
        b = rng.uniform(-1, 1, T)
        fa = objective(build_coefficients(a), 60).total
        fb = objective(build_coefficients(b), 60).total
        fm = objective(build_coefficients(lam * a + (1 - lam) * b), 60).total
        assert fm <= lam * fa + (1 - lam) * fb + 1e-12

    def test_objective_deterministic(self, ref20):
        a = objective(ref20, 3000).total
        b = objective(ref20, 3000).total
        assert a == b
