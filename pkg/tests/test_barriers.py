"""Barrier functions, calibration curves and the acceptance test."""

from __future__ import annotations

import math

import numpy as np
import pytest
from mpmath import mp, mpf
from mpmath import exp as mp_exp
from mpmath import gamma as mp_gamma
from mpmath import quad as mp_quad

from fracadapt import (BarrierKind, BarrierSpec, ProblemSpec, barrier_value,
                       calibration, check_interval, error_bound_curve, rho,
                       run_adaptive, sample_norms, solve_scalar, uniform)
from fracadapt.adaptive import AdaptiveConfig
from fracadapt.experiments import build_example
from fracadapt.residual import NormKind, ResidualSamples

mp.dps = 40


def caputo_of_function(fn_derivative, alpha, t):
    """Caputo derivative of order alpha < 1 by kernel quadrature at 80
    digits, given the classical derivative of the function."""
    with mp.workdps(80):
        val = mp_quad(lambda s: (mpf(t) - s) ** (-mpf(alpha)) * fn_derivative(s),
                      [0, mpf(t)])
        return float(val / mp_gamma(1 - mpf(alpha)))


@pytest.fixture(scope="module")
def simple_problem():
    return ProblemSpec((0.5,), (lambda t: 1.0,), 0.0, lambda t: 1.0, 0.0, 1.0)


class TestBarrierValue:
    def test_jump_barrier(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        assert barrier_value(0.0, spec) == 0.0
        assert barrier_value(0.001, spec) == 1.0

    def test_capped_power_barrier(self, ex1_alpha04):
        spec = BarrierSpec(BarrierKind.R1, ex1_alpha04, tau=0.5)
        assert barrier_value(0.25, spec) == pytest.approx(0.5 ** -0.6, rel=1e-14)
        assert barrier_value(2.0, spec) == pytest.approx(2.0 ** -0.6, rel=1e-14)
        assert barrier_value(0.0, spec) == 0.0

    def test_exponential_barrier(self, ex1_alpha04):
        spec = BarrierSpec(BarrierKind.EXPONENTIAL, ex1_alpha04, mu=10.0)
        assert barrier_value(0.0, spec) == 0.0
        assert barrier_value(200.0, spec) == pytest.approx(1.0, rel=1e-12)


class TestCalibration:
    def test_single_term_value(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        assert calibration(1.0, spec) == pytest.approx(1.0 / math.sqrt(math.pi),
                                                       rel=1e-13)

    def test_example1_direct_formula(self, ex1_alpha04):
        spec = BarrierSpec(BarrierKind.R0, ex1_alpha04)
        q1 = 0.5 * math.exp(-0.2)
        expect = (1.0 + q1 / math.gamma(0.6)
                  + (1.0 - q1) / math.gamma(1.0 - 4.0 / 15.0))
        assert calibration(1.0, spec) == pytest.approx(expect, rel=1e-13)

    def test_jump_barrier_image_matches_reformulated_derivative(self, ex1_alpha04):
        # D^a of the unit jump is t^-a / Gamma(1-a); check the full curve
        # against a term-by-term evaluation at scattered times
        spec = BarrierSpec(BarrierKind.R0, ex1_alpha04)
        for t in (0.05, 0.3, 1.0):
            expect = ex1_alpha04.lambda_
            for a, q in zip(ex1_alpha04.alphas, ex1_alpha04.q_funcs):
                expect += q(t) * t ** (-a) / math.gamma(1.0 - a)
            assert calibration(t, spec) == pytest.approx(expect, rel=1e-13)

    def test_unit_order_drops_leading_term(self):
        prob = build_example(5, 0.3, c1=0.5)
        spec = BarrierSpec(BarrierKind.R0, prob)
        t = 0.4
        expect = 1.0 + prob.q_funcs[1](t) * t ** (-0.3) / math.gamma(0.7)
        assert calibration(t, spec) == pytest.approx(expect, rel=1e-13)

    def test_capped_power_reduction_below_tau(self, ex1_alpha04):
        # for t <= tau all tail factors vanish
        tau = 0.5
        spec = BarrierSpec(BarrierKind.R1, ex1_alpha04, tau=tau)
        alpha1 = ex1_alpha04.alphas[0]
        beta = 1.0 - alpha1
        for t in (0.1, 0.5):
            expect = 1.0 * tau ** (alpha1 - 1.0)
            for a, q in zip(ex1_alpha04.alphas, ex1_alpha04.q_funcs):
                expect += tau ** (-beta) * q(t) * t ** (-a) / math.gamma(1.0 - a)
            assert calibration(t, spec) == pytest.approx(expect, rel=1e-13)

    def test_capped_power_image_vs_kernel_quadrature(self, ex1_alpha04):
        # Gamma(1-a_i) D^{a_i} E1(t) = tau^-beta t^-a_i [1 - rho_i(tau/t)]
        # for t > tau, where E1(s) = (max(tau, s))^(alpha1-1) with E1(0) = 0.
        # The kernel-quadrature side is the jump-at-zero part plus the
        # classical-derivative integral over (tau, t).
        tau = 0.2
        alpha1 = ex1_alpha04.alphas[0]
        beta = 1.0 - alpha1
        for a_i in ex1_alpha04.alphas:
            for t in (0.35, 0.8):
                val = mp_quad(
                    lambda s: (mpf(t) - s) ** (-mpf(a_i))
                    * (mpf(alpha1) - 1) * s ** (mpf(alpha1) - 2), [tau, t])
                lhs = float(val) + tau ** (alpha1 - 1.0) * t ** (-a_i)
                rhs = tau ** (-beta) * t ** (-a_i) * (1.0 - rho(a_i, alpha1, tau / t))
                assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_exponential_small_t_limit(self):
        prob = build_example(5, 0.3, c1=1.0)
        spec = BarrierSpec(BarrierKind.EXPONENTIAL, prob, mu=10.0)
        # R(0+) = q1(0) * mu
        assert calibration(1e-9, spec) == pytest.approx(
            prob.q_funcs[0](0.0) * 10.0, rel=1e-6)

    def test_exponential_fractional_term_vs_quadrature(self):
        prob = build_example(5, 0.3, c1=1.0)
        mu = 10.0
        spec = BarrierSpec(BarrierKind.EXPONENTIAL, prob, mu=mu)
        t = 0.37
        frac = caputo_of_function(lambda s: mu * mp_exp(-mu * s), 0.3, t)
        expect = (prob.q_funcs[0](t) * mu * math.exp(-mu * t)
                  + prob.q_funcs[1](t) * frac
                  + prob.lambda_ * (1.0 - math.exp(-mu * t)))
        assert calibration(t, spec) == pytest.approx(expect, rel=1e-9)

    def test_domain_error(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        with pytest.raises(ValueError):
            calibration(0.0, spec)

    def test_r1_needs_fractional_leading_order(self):
        prob = build_example(5, 0.3, c1=0.5)
        with pytest.raises(ValueError):
            BarrierSpec(BarrierKind.R1, prob, tau=0.1)


class TestCheckInterval:
    def test_zero_samples_pass(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        samples = ResidualSamples(np.array([0.5]), np.array([0.0]), NormKind.L2)
        assert check_interval(samples, 1e-12, spec)

    def test_boundary_inclusive(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        tol = 1e-3
        t = 0.5
        exact = tol * calibration(t, spec)
        samples = ResidualSamples(np.array([t]), np.array([exact]), NormKind.L2)
        assert check_interval(samples, tol, spec)
        samples_over = ResidualSamples(np.array([t]), np.array([exact * (1 + 1e-9)]),
                                       NormKind.L2)
        assert not check_interval(samples_over, tol, spec)

    def test_monotone_in_tolerance(self, ex1_alpha04, rng):
        spec = BarrierSpec(BarrierKind.R0, ex1_alpha04)
        times = np.sort(rng.uniform(0.05, 1.0, 12))
        norms = rng.uniform(0.0, 2e-3, 12)
        samples = ResidualSamples(times, norms, NormKind.L2)
        for tol1 in (1e-4, 1e-3, 1e-2):
            if check_interval(samples, tol1, spec):
                assert check_interval(samples, 10 * tol1, spec)

    def test_accepted_run_regression(self, ex1_alpha04):
        spec = BarrierSpec(BarrierKind.R0, ex1_alpha04)
        tol = 1e-2
        mesh, hist, _ = run_adaptive(
            ex1_alpha04, AdaptiveConfig(tol=tol, barrier=spec))
        samples = sample_norms(hist, ex1_alpha04, 9)
        pts = mesh.points
        oks, fails_half = [], []
        for j in range(1, mesh.M + 1):
            part = samples.restrict(float(pts[j - 1]), float(pts[j]))
            # drop the node sample (residual vanishes there by construction)
            inner = ResidualSamples(part.times[:-1], part.norms[:-1], part.norm_kind)
            if inner.times.size == 0:
                continue
            oks.append(check_interval(inner, tol, spec))
            fails_half.append(not check_interval(inner, tol / 2.0, spec))
        assert all(oks)
        assert any(fails_half)

    def test_empty_samples_rejected(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        empty = ResidualSamples(np.array([]), np.array([]), NormKind.L2)
        with pytest.raises(ValueError):
            check_interval(empty, 1e-3, spec)


class TestErrorBoundCurve:
    def test_zero_residual(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        samples = ResidualSamples(np.array([0.25, 0.5, 1.0]), np.zeros(3),
                                  NormKind.L2)
        bound = error_bound_curve(samples, spec, [0.3, 0.9])
        assert bound == [0.0, 0.0]

    def test_r1_uses_capped_power_below_tau(self, ex1_alpha04):
        tau = 0.5
        spec = BarrierSpec(BarrierKind.R1, ex1_alpha04, tau=tau)
        samples = ResidualSamples(np.array([0.1, 0.4, 1.0]),
                                  np.array([1e-3, 2e-3, 1e-3]), NormKind.L2)
        bound = error_bound_curve(samples, spec, [0.2, 0.4])
        sup = max(n / calibration(float(t), spec)
                  for t, n in zip(samples.times[:2], samples.norms[:2]))
        assert bound[1] == pytest.approx(tau ** (0.4 - 1.0) * sup, rel=1e-12)

    def test_power_weight_option(self, ex1_alpha04):
        spec = BarrierSpec(BarrierKind.R1, ex1_alpha04, tau=0.5)
        samples = ResidualSamples(np.array([0.25, 1.0]), np.array([1e-3, 1e-3]),
                                  NormKind.L2)
        capped = error_bound_curve(samples, spec, [0.25])[0]
        plain = error_bound_curve(samples, spec, [0.25], power_weight=True)[0]
        assert plain > capped  # t^(a1-1) > tau^(a1-1) for t < tau

    def test_running_sup_monotone(self, ex1_alpha04):
        spec = BarrierSpec(BarrierKind.R0, ex1_alpha04)
        hist = solve_scalar(ex1_alpha04, uniform(8, 1.0))
        samples = sample_norms(hist, ex1_alpha04, 8)
        ts = np.linspace(0.05, 1.0, 12)
        bound = error_bound_curve(samples, spec, ts)
        assert all(b2 >= b1 - 1e-15 for b1, b2 in zip(bound, bound[1:]))

    def test_coverage_required(self, simple_problem):
        spec = BarrierSpec(BarrierKind.R0, simple_problem)
        samples = ResidualSamples(np.array([0.25]), np.array([1e-3]), NormKind.L2)
        with pytest.raises(ValueError):
            error_bound_curve(samples, spec, [0.5])
