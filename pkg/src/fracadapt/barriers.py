"""Barrier functions, calibration curves, and a posteriori error bounds.

A barrier is a nonnegative time function whose image under the multiterm
operator (plus the reaction term) dominates the sampled residual norm; the
resulting calibration curve scales the tolerance in the step-acceptance test,
and the same machinery turns measured residual norms into a guaranteed
pointwise error bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import EvaluationError
from .l1 import ProblemSpec
from .residual import ResidualSamples
from .specfun import rho

__all__ = ["BarrierKind", "BarrierSpec", "calibration", "barrier_value",
           "check_interval", "error_bound_curve"]


class BarrierKind(str, enum.Enum):
    R0 = "r0"                 # jump barrier: 1 for t > 0
    R1 = "r1"                 # capped power barrier (max{tau, t})^(alpha1 - 1)
    EXPONENTIAL = "exp"       # 1 - exp(-mu t)
    CUSTOM = "custom"


@dataclass(frozen=True)
class BarrierSpec:
    """Choice of calibration curve, bound to a concrete problem.

    For the R1 kind, ``tau=None`` means the parameter is bound at run time
    (the adaptive driver ties it to five times the first accepted step).
    """

    kind: BarrierKind
    problem: ProblemSpec
    tau: float | None = None
    mu: float = 10.0
    custom_calibration: Callable[[float], float] | None = None
    custom_barrier: Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BarrierKind(self.kind))
        if self.kind is BarrierKind.R1:
            if self.problem.has_unit_order:
                raise ValueError("the R1 barrier requires a leading order below one")
            if self.tau is not None and not self.tau > 0.0:
                raise ValueError(f"tau must be positive, got {self.tau}")
        if self.kind is BarrierKind.EXPONENTIAL and not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.kind is BarrierKind.CUSTOM and (
                self.custom_calibration is None or self.custom_barrier is None):
            raise ValueError("custom barriers need both callables")

    def with_tau(self, tau: float) -> "BarrierSpec":
        return replace(self, tau=tau)


def _caputo_exponential(alpha: float, mu: float, t: float) -> float:
    """Caputo derivative of order alpha < 1 of ``1 - exp(-mu s)`` at s = t,
    by weighted quadrature of the kernel against the classical derivative."""
    val, err = integrate.quad(lambda s: mu * math.exp(-mu * s), 0.0, t,
                              weight="alg", wvar=(0.0, -alpha),
                              epsabs=1e-12, epsrel=1e-11, limit=200)
    if err > 1e-8 * max(abs(val), 1e-30):
        raise EvaluationError(f"barrier quadrature error {err:.2e} too large",
                              partial=val, err_estimate=err)
    return val / math.gamma(1.0 - alpha)


def calibration(t: float, spec: BarrierSpec) -> float:
    """Calibration curve value: the multiterm image of the barrier at time t."""
    if not t > 0.0:
        raise ValueError(f"calibration curves are defined for t > 0, got {t}")
    p = spec.problem
    if spec.kind is BarrierKind.CUSTOM:
        return float(spec.custom_calibration(t))
    if spec.kind is BarrierKind.R0:
        total = p.lambda_
        for alpha_i, q_i in zip(p.alphas, p.q_funcs):
            if alpha_i == 1.0:
                continue  # the unit-order derivative of the jump barrier vanishes
            total += q_i(t) * t ** (-alpha_i) / math.gamma(1.0 - alpha_i)
        return total
    if spec.kind is BarrierKind.R1:
        if spec.tau is None:
            raise ValueError("the R1 barrier has no tau bound yet")
        alpha1 = p.alphas[0]
        beta = 1.0 - alpha1
        tau_hat = spec.tau / t
        total = p.lambda_ * barrier_value(t, spec)
        w = spec.tau ** (-beta)
        for alpha_i, q_i in zip(p.alphas, p.q_funcs):
            total += (w * q_i(t) * t ** (-alpha_i)
                      * (1.0 - rho(alpha_i, alpha1, tau_hat))
                      / math.gamma(1.0 - alpha_i))
        return total
    # exponential barrier
    total = p.lambda_ * (1.0 - math.exp(-spec.mu * t))
    for alpha_i, q_i in zip(p.alphas, p.q_funcs):
        q = q_i(t)
        if alpha_i == 1.0:
            total += q * spec.mu * math.exp(-spec.mu * t)
        elif q != 0.0:
            total += q * _caputo_exponential(alpha_i, spec.mu, t)
    return total


def barrier_value(t: float, spec: BarrierSpec) -> float:
    """The barrier function itself at time t >= 0."""
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if spec.kind is BarrierKind.CUSTOM:
        return float(spec.custom_barrier(t))
    if spec.kind is BarrierKind.R0:
        return 1.0 if t > 0.0 else 0.0
    if spec.kind is BarrierKind.R1:
        if spec.tau is None:
            raise ValueError("the R1 barrier has no tau bound yet")
        if t == 0.0:
            return 0.0
        return max(spec.tau, t) ** (spec.problem.alphas[0] - 1.0)
    return 1.0 - math.exp(-spec.mu * t)


def check_interval(samples: ResidualSamples, tol: float, spec: BarrierSpec) -> bool:
    """True iff every sampled norm is at most ``tol * calibration`` (inclusive)."""
    if samples.times.size == 0:
        raise ValueError("check_interval needs at least one sample")
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    for t, r in zip(samples.times, samples.norms):
        if r > tol * calibration(float(t), spec):
            return False
    return True


def error_bound_curve(samples: ResidualSamples, spec: BarrierSpec,
                      t_eval: Sequence[float],
                      power_weight: bool = False) -> list[float]:
    """A posteriori error bound at the requested times.

    The bound is ``barrier(t) * sup_{s <= t} norm(s) / calibration(s)`` over
    the sampled residual.  With ``power_weight=True`` the R1 kind reports the
    plain power ``t^(alpha1-1)`` instead of the capped barrier.
    """
    t_eval = [float(t) for t in t_eval]
    if samples.times.size == 0:
        return [0.0 for _ in t_eval]
    t_max = max(t_eval) if t_eval else 0.0
    if t_max > samples.times[-1] * (1.0 + 1e-12):
        raise ValueError("samples do not cover the evaluation window")
    ratios = np.array([r / calibration(float(t), spec)
                       for t, r in zip(samples.times, samples.norms)])
    running = np.maximum.accumulate(ratios)
    out: list[float] = []
    for t in t_eval:
        idx = int(np.searchsorted(samples.times, t * (1.0 + 1e-15), side="right")) - 1
        sup = float(running[idx]) if idx >= 0 else 0.0
        if power_weight and spec.kind is BarrierKind.R1:
            weight = t ** (spec.problem.alphas[0] - 1.0) if t > 0.0 else 0.0
        else:
            weight = barrier_value(t, spec)
        out.append(weight * sup)
    return out
