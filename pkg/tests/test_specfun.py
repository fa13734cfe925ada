"""Special-function tests against high-precision and closed-form oracles.

Frozen constants were produced by the mpmath oracles defined here (60-digit
working precision); the oracles stay in the file so every value can be
regenerated.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from mpmath import mp, mpf
from mpmath import erfc as mp_erfc
from mpmath import exp as mp_exp
from mpmath import gamma as mp_gamma
from mpmath import quad as mp_quad

from fracadapt import (EvaluationError, FKernelParams, MLParams,
                       RootNotFoundError, SignedPowerSum,
                       constant_coeff_inverse, f_kernel, gauss_2f1,
                       homogeneous_solution, ml_lower_bound, ml_two_param,
                       mml_contour, mml_series, rho, sign_change_root)

mp.dps = 60


def ml_series_oracle(alpha, beta, x, terms=None):
    """Plain series with working precision scaled to the cancellation size."""
    peak = abs(x) ** (1.0 / alpha)
    dps = max(60, int(peak / math.log(10.0)) + 60)
    if terms is None:
        terms = max(400, int(3.5 * peak / alpha) + 200)
    with mp.workdps(dps):
        return float(sum(mpf(x) ** k / mp_gamma(mpf(alpha) * k + mpf(beta))
                         for k in range(terms)))


def mml_oracle_2(betas, ss, b0, terms=500):
    """Double sum over compositions for two orders, 60-digit arithmetic."""
    total = mpf(0)
    for k in range(terms):
        for k1 in range(k + 1):
            k2 = k - k1
            c = mp_gamma(k + 1) / (mp_gamma(k1 + 1) * mp_gamma(k2 + 1))
            total += (c * mpf(ss[0]) ** k1 * mpf(ss[1]) ** k2
                      / mp_gamma(mpf(b0) + mpf(betas[0]) * k1 + mpf(betas[1]) * k2))
    return float(total)


# -- frozen oracle values ---------------------------------------------------
E_04_1_AT_M1 = 0.4420633596852235          # ml_series_oracle(0.4, 1, -1)
MML_06_04 = 0.5049464943655893             # mml_oracle_2((0.6, 0.4), (-0.5, -0.25), 1)
FKERNEL_04_01 = 0.1572217625075689         # 0.5^(0.4-1) * mml_oracle_2((0.4, 0.1), ...)
HYP2F1_FROZEN = 0.7473570397387298         # mpmath hyp2f1(0.3, -0.6, 0.4, 0.5)
RHO_025_06_05 = 0.3604631731022977         # quadrature oracle, see test_rho_quadrature
ETILDE_1_13 = 0.3492243726565754           # mml_oracle_2((0.5, 0.3), (-1, -1), 1.3)


class TestMlTwoParam:
    def test_exponential_case(self):
        assert ml_two_param(1.0, 1.0, -1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_zero_argument(self):
        assert ml_two_param(0.5, 1.0, 0.0) == 1.0

    def test_series_oracle_frozen(self):
        got = ml_two_param(0.4, 1.0, -1.0)
        assert got == pytest.approx(E_04_1_AT_M1, rel=1e-12)
        assert got == pytest.approx(ml_series_oracle(0.4, 1.0, -1.0), rel=1e-12)

    def test_half_order_closed_form_wide_range(self):
        # E_{1/2,1}(-z) = exp(z^2) erfc(z); exercises series and contour paths.
        for z in (0.3, 1.0, 3.0, 10.0, 50.0, 300.0):
            exact = float(mp_exp(z * z) * mp_erfc(z))
            got = ml_two_param(0.5, 1.0, -z)
            assert got == pytest.approx(exact, rel=1e-10), f"z={z}"

    def test_contour_path_other_orders(self):
        for alpha, x in ((0.3, -2.5), (0.7, -25.0), (0.9, -50.0), (0.25, -2.0)):
            exact = ml_series_oracle(alpha, 1.0, x)
            assert ml_two_param(alpha, 1.0, x) == pytest.approx(exact, rel=1e-10)

    def test_spectral_representation_oracle(self):
        # independent oracle: E_alpha(-z) as the Laplace transform of the
        # classical spectral density, integrated by tanh-sinh at 50 digits
        def oracle(alpha, z):
            with mp.workdps(50):
                t = mpf(z) ** (1 / mpf(alpha))

                def kernel(r):
                    num = r ** (mpf(alpha) - 1) * mp.sin(mp.pi * mpf(alpha)) / mp.pi
                    den = (r ** (2 * mpf(alpha))
                           + 2 * r ** mpf(alpha) * mp.cos(mp.pi * mpf(alpha)) + 1)
                    return mp.exp(-r * t) * num / den

                return float(mp_quad(kernel, [0, 1, mp.inf]))

        for alpha, z in ((0.3, 40.0), (0.6, 200.0), (0.85, 77.0)):
            got = ml_two_param(alpha, 1.0, -z)
            assert got == pytest.approx(oracle(alpha, z), rel=1e-11)

    def test_very_large_negative_arguments(self):
        # the two-term tail expansion bounds the truth to within its own
        # third term; at these sizes that is far below 1e-8 relative
        for alpha, z in ((0.3, 1e6), (0.2, 1e8)):
            got = ml_two_param(alpha, 1.0, -z)
            asym = (1.0 / (z * math.gamma(1 - alpha))
                    - 1.0 / (z * z * math.gamma(1 - 2 * alpha)))
            assert got == pytest.approx(asym, rel=1e-8)

    def test_beta_two_and_general(self):
        assert ml_two_param(1.0, 2.0, -3.0) == pytest.approx(
            math.expm1(-3.0) / -3.0, rel=1e-13)
        assert ml_two_param(1.0, 1.5, -4.0) == pytest.approx(
            ml_series_oracle(1.0, 1.5, -4.0), rel=1e-10)
        assert ml_two_param(0.6, 1.4, -2.0) == pytest.approx(
            ml_series_oracle(0.6, 1.4, -2.0), rel=1e-10)

    def test_positive_argument(self):
        assert ml_two_param(0.5, 1.0, 2.0) == pytest.approx(
            ml_series_oracle(0.5, 1.0, 2.0), rel=1e-11)

    def test_overflow_guard(self):
        with pytest.raises(EvaluationError):
            ml_two_param(1.0, 1.0, 800.0)
        with pytest.raises(EvaluationError):
            ml_two_param(0.3, 1.0, 50.0)  # value ~ exp(50^(10/3)) overflows

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ml_two_param(0.0, 1.0, -1.0)
        with pytest.raises(ValueError):
            ml_two_param(1.2, 1.0, -1.0)
        with pytest.raises(ValueError):
            ml_two_param(0.5, -1.0, -1.0)


class TestMmlSeries:
    def test_single_order_reduction(self, rng):
        for _ in range(25):
            alpha = rng.uniform(0.15, 1.0)
            beta0 = rng.uniform(0.2, 1.8)
            x = -rng.uniform(0.0, 1.0)
            lhs = mml_series(MLParams(beta0, (alpha,), (x,)))
            rhs = ml_two_param(alpha, beta0, x)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_all_zero_args(self):
        val = mml_series(MLParams(0.7, (0.6, 0.4), (0.0, 0.0)))
        assert val == pytest.approx(1.0 / math.gamma(0.7), rel=1e-14)

    def test_frozen_double_sum(self):
        got = mml_series(MLParams(1.0, (0.6, 0.4), (-0.5, -0.25)))
        assert got == pytest.approx(MML_06_04, rel=1e-12)

    def test_permutation_symmetry(self, rng):
        # Draw domain kept inside the documented convergence envelope of the
        # capped outer sum (moderate arguments, orders not too small).
        for _ in range(25):
            ell = int(rng.integers(2, 4))
            orders = tuple(rng.uniform(0.35, 1.0, ell))
            args = tuple(-rng.uniform(0.05, 0.8, ell))
            beta0 = float(rng.uniform(0.2, 1.8))
            perm = rng.permutation(ell)
            a = mml_series(MLParams(beta0, orders, args))
            b = mml_series(MLParams(beta0, tuple(orders[p] for p in perm),
                                    tuple(args[p] for p in perm)))
            assert a == pytest.approx(b, rel=1e-12)

    def test_recurrence_identity(self, rng):
        # 1/Gamma(b0) + sum_j z_j E_{(b),b0+b_j}(z) = E_{(b),b0}(z)
        for _ in range(10):
            ell = int(rng.integers(1, 4))
            betas = tuple(rng.uniform(0.35, 0.95, ell))
            zs = tuple(-rng.uniform(0.05, 0.8, ell))
            b0 = float(rng.uniform(0.3, 0.9))
            lhs = 1.0 / math.gamma(b0)
            for b_j, z_j in zip(betas, zs):
                lhs += z_j * mml_series(MLParams(b0 + b_j, betas, zs))
            rhs = mml_series(MLParams(b0, betas, zs))
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    def test_overflow_guard(self):
        with pytest.raises(EvaluationError):
            mml_series(MLParams(1.0, (0.2, 0.1), (-400.0, -400.0)))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            MLParams(0.0, (0.5,), (-1.0,))
        with pytest.raises(ValueError):
            MLParams(1.0, (0.5, 0.4), (-1.0,))
        with pytest.raises(ValueError):
            MLParams(1.0, (1.2,), (-1.0,))


class TestFKernel:
    def test_exponential_reduction(self):
        p = FKernelParams(mus=(1.0,), beta=1.0, as_=(1.0,), t=2.0)
        assert f_kernel(p) == pytest.approx(math.exp(-2.0), rel=1e-13)

    def test_single_order_reduction(self):
        p = FKernelParams(mus=(0.5,), beta=1.0, as_=(1.0,), t=1.0)
        assert f_kernel(p) == pytest.approx(ml_two_param(0.5, 1.0, -1.0), rel=1e-12)

    def test_frozen_value_and_sign(self):
        # Outer terms peak near 1.4e5 before converging (k ~ 365), so the
        # float64 sum carries a conditioning error of order 1e-8 here; the
        # frozen oracle value is fully converged at 60 digits.
        p = FKernelParams(mus=(0.4, 0.1), beta=0.4, as_=(1.0, 1.0), t=0.5)
        got = f_kernel(p)
        assert got == pytest.approx(FKERNEL_04_01, rel=1e-6)
        assert got >= 0.0

    def test_positivity_grid(self):
        # complete monotonicity regime: 0 <= mu_m < ... < mu_1 <= beta <= 1.
        # Arguments stay moderate so the capped series converges.
        for t in np.logspace(-2, 0, 8):
            for beta in (0.5, 0.8, 1.0):
                p = FKernelParams(mus=(0.5, 0.2), beta=beta, as_=(1.3, 0.7), t=float(t))
                assert f_kernel(p) >= 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            FKernelParams(mus=(0.5,), beta=1.0, as_=(1.0, 2.0), t=1.0)


class TestGauss2F1:
    def test_b_zero(self):
        assert gauss_2f1(0.7, 0.0, 1.3, 0.4) == 1.0

    def test_endpoint_identity(self):
        for a_i, a_1 in ((0.2, 0.6), (0.3, 0.9), (0.1, 0.4)):
            beta = 1.0 - a_1
            got = gauss_2f1(a_i, -beta, a_1, 1.0)
            expect = (math.gamma(a_1) * math.gamma(1.0 - a_i)
                      / math.gamma(a_1 - a_i))
            assert got == pytest.approx(expect, rel=1e-12)

    def test_frozen_series_value(self):
        assert gauss_2f1(0.3, -0.6, 0.4, 0.5) == pytest.approx(HYP2F1_FROZEN, rel=1e-10)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            gauss_2f1(0.3, 0.2, -1.0, 0.5)
        with pytest.raises(ValueError):
            gauss_2f1(2.0, 3.0, 1.5, 1.0)  # c - a - b < 0 at s = 1
        with pytest.raises(ValueError):
            gauss_2f1(0.3, 0.2, 0.4, 1.5)


class TestRho:
    def test_leading_order_identity(self):
        for s in np.arange(0.1, 0.95, 0.1):
            for a1 in (0.3, 0.6, 0.9):
                assert rho(a1, a1, float(s)) == pytest.approx(
                    (1.0 - s) ** (1.0 - a1), rel=1e-12)

    def test_vanishes_beyond_one(self):
        assert rho(0.2, 0.6, 1.7) == 0.0
        assert rho(0.2, 0.6, 1.0) == 0.0

    def test_quadrature_oracle(self):
        # tau^-beta rho(tau) = beta * int_tau^1 s^(-beta-1) (1-s)^(-a_i) ds
        a_i, a_1, s = 0.25, 0.6, 0.5
        beta = 1.0 - a_1
        oracle = float(mpf(s) ** mpf(beta) * mpf(beta) * mp_quad(
            lambda sh: sh ** (-mpf(beta) - 1) * (1 - sh) ** (-mpf(a_i)), [s, 1]))
        assert oracle == pytest.approx(RHO_025_06_05, rel=1e-12)
        assert rho(a_i, a_1, s) == pytest.approx(oracle, rel=1e-10)

    def test_range_and_bound(self):
        for s in np.arange(0.1, 0.95, 0.1):
            for a_i in (0.1, 0.25, 0.4):
                val = rho(float(a_i), 0.6, float(s))
                assert 0.0 <= val < 1.0
                assert val <= (1.0 - s) ** a_i + 1e-12


class TestMmlContour:
    def test_agrees_with_series(self):
        got = mml_contour(1.0, 1.3, 1.0, [1.0], [0.5, 0.2])
        assert got == pytest.approx(ETILDE_1_13, rel=1e-8)

    def test_positivity_grid(self):
        alphas = (0.6, 0.25)
        for t in np.logspace(-1.2, 0.8, 20):
            for beta in np.linspace(1.02, 1.0 + 0.95 * alphas[0], 20):
                val = mml_contour(float(t), float(beta), 0.8, [0.7], alphas)
                assert val > 0.0

    def test_small_t_limit(self):
        # The limit value is 1/Gamma(beta); the deficit decays like t^(a1-a2).
        beta = 1.2
        limit = 1.0 / math.gamma(beta)
        deficits = [limit - mml_contour(t, beta, 1.0, [1.0], [0.5, 0.2])
                    for t in (1e-4, 1e-6, 1e-8)]
        assert deficits[0] > deficits[1] > deficits[2] > 0.0
        assert mml_contour(1e-8, beta, 1.0, [1.0], [0.5, 0.2]) == pytest.approx(
            limit, rel=2e-2)
        # ratio of successive deficits ~ (1e-2)^(0.3)
        assert deficits[1] / deficits[0] == pytest.approx(1e-2 ** 0.3, rel=0.15)
        assert deficits[2] / deficits[1] == pytest.approx(1e-2 ** 0.3, rel=0.15)

    def test_single_order(self):
        got = mml_contour(2.0, 1.4, 0.5, [], [0.6])
        exact = ml_series_oracle(0.6, 1.4, -0.5 * 2.0 ** 0.6)
        assert got == pytest.approx(exact, rel=1e-8)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            mml_contour(1.0, 0.9, 1.0, [1.0], [0.5, 0.2])   # beta <= 1
        with pytest.raises(ValueError):
            mml_contour(1.0, 1.3, 0.0, [1.0], [0.5, 0.2])   # lambda = 0
        with pytest.raises(ValueError):
            mml_contour(1.0, 1.3, 1.0, [1.0], [0.2, 0.5])   # orders increasing


class TestSignChangeRoot:
    def test_linear(self):
        assert sign_change_root(SignedPowerSum((0.0, 1.0), (1.0, -1.0))) == pytest.approx(1.0)

    def test_sqrt_case_vs_scan(self):
        p = SignedPowerSum((0.0, 0.5, 1.0), (2.0, -1.0, -1.0))
        root = sign_change_root(p)
        grid = np.logspace(-6, 3, 20001)
        vals = p(grid)
        crossings = np.nonzero(np.diff(np.sign(vals)))[0]
        assert crossings.size == 1
        assert grid[crossings[0]] <= root <= grid[crossings[0] + 1]
        assert abs(p(root)) <= 1e-12 * sum(abs(c) for c in p.coefficients) * max(1.0, root)

    def test_mixed_powers_sign_pattern(self):
        p = SignedPowerSum((0.0, 0.3, 0.8), (1.0, 1.0, -3.0))
        root = sign_change_root(p)
        below = np.geomspace(root * 1e-3, root * (1 - 1e-6), 10000)
        above = np.geomspace(root * (1 + 1e-6), root * 1e3, 10000)
        assert np.all(p(below) > 0.0)
        assert np.all(p(above) < 0.0)

    def test_opposite_signs_near_root(self):
        p = SignedPowerSum((0.0, 0.4, 1.0), (0.7, 2.0, -1.3))
        root = sign_change_root(p)
        assert p(root * (1 - 1e-6)) > 0.0 > p(root * (1 + 1e-6))

    def test_bracket_expansion_failure(self):
        p = SignedPowerSum((0.0, 0.01), (1.0, -1e-12))
        with pytest.raises(RootNotFoundError):
            sign_change_root(p)

    def test_invalid_sign_structure(self):
        with pytest.raises(ValueError):
            SignedPowerSum((0.0, 0.5, 1.0), (1.0, -1.0, 1.0))
        with pytest.raises(ValueError):
            SignedPowerSum((0.0, 1.0), (-1.0, 1.0))
        with pytest.raises(ValueError):
            SignedPowerSum((0.1, 1.0), (1.0, -1.0))


class TestHomogeneousSolution:
    def test_lambda_zero(self):
        assert homogeneous_solution(0.7, 0.0, [1.0, 1.0], [0.6, 0.2]) == 1.0

    def test_single_order_reduction(self):
        for t in (0.2, 1.0, 3.0):
            got = homogeneous_solution(t, 1.3, [1.0], [0.6])
            assert got == pytest.approx(ml_two_param(0.6, 1.0, -1.3 * t ** 0.6),
                                        rel=1e-11)

    def test_bounds_and_monotonicity(self):
        ts = np.linspace(0.0, 1.0, 21)
        vals = [homogeneous_solution(float(t), 1.0, [1.0, 1.0], [0.6, 0.2])
                for t in ts]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        for t, v in zip(ts[1:], vals[1:]):
            assert v >= ml_lower_bound(float(t), 1.0, 1.0, [1.0, 1.0], [0.6, 0.2]) - 1e-10

    def test_alternative_closed_form(self):
        # independent route: y(t) = 1 - lam t^a1 E_{(a1, a1-a2), 1+a1}(args),
        # equivalent to the kernel-sum form through the offset recurrence
        lam, qs, alphas = 1.0, (1.0, 1.0), (0.6, 0.2)
        for t in (0.15, 0.45, 0.9):
            args = (-lam * t ** 0.6, -qs[1] * t ** (0.6 - 0.2))
            alt = 1.0 - lam * t ** 0.6 * mml_series(
                MLParams(1.6, (0.6, 0.4), args))
            got = homogeneous_solution(t, lam, qs, alphas)
            assert got == pytest.approx(alt, rel=1e-9)

    def test_requires_normalised_q1(self):
        with pytest.raises(ValueError):
            homogeneous_solution(1.0, 1.0, [0.5, 0.5], [0.6, 0.2])


class TestConstantCoeffInverse:
    def test_constant_source_fixed_point(self):
        got = constant_coeff_inverse(lambda s: 2.0, 1.0, 2.0, [1.0, 1.0],
                                     [0.5, 0.25], 1.0)
        assert got == pytest.approx(1.0, abs=1e-10)

    def test_relaxation(self):
        for t in (0.3, 1.0):
            got = constant_coeff_inverse(lambda s: 0.0, t, 1.0, [1.0], [0.5], 1.0)
            assert got == pytest.approx(ml_two_param(0.5, 1.0, -t ** 0.5), rel=1e-9)

    def test_quadrature_self_consistency(self):
        coarse = constant_coeff_inverse(lambda s: 1.0, 1.0, 1.0, [1.0, 1.0],
                                        [0.4, 0.2], 0.0, quad_tol=1e-7)
        fine = constant_coeff_inverse(lambda s: 1.0, 1.0, 1.0, [1.0, 1.0],
                                      [0.4, 0.2], 0.0, quad_tol=1e-11)
        assert coarse == pytest.approx(fine, rel=1e-6)


class TestMlLowerBound:
    def test_at_zero(self):
        assert ml_lower_bound(0.0, 0.7, 1.0, [1.0], [0.5]) == 0.7

    def test_all_qmin_zero(self):
        assert ml_lower_bound(1.0, 1.0, 1.0, [0.0, 0.0], [0.6, 0.2]) == 0.0

    def test_dominant_term_switches(self):
        alphas = (1.0, 0.7, 0.3)
        qmins = (1.0, 1.0, 1.0)

        def argbest(t):
            vals = [ml_two_param(a, 1.0, -t ** a) for a in alphas]
            return int(np.argmax(vals))

        picks = {argbest(t) for t in (0.1, 1.0, 10.0)}
        assert len(picks) >= 2  # the maximising order changes with t
        for t in (0.1, 1.0, 10.0):
            expect = max(ml_two_param(a, 1.0, -t ** a) for a in alphas)
            assert ml_lower_bound(t, 1.0, 1.0, qmins, alphas) == pytest.approx(expect)
