"""Mittag-Leffler-type special functions and constant-coefficient solution kernels.

This module evaluates, in 64-bit arithmetic,

* the two-parameter Mittag-Leffler function ``E_{a,b}(x) = sum_k x^k / Gamma(a*k + b)``,
* its multi-order generalisation (a double series over compositions of the
  outer summation index),
* the associated power-weighted kernel ``t^{b-1} * E_{(mu),b}(-a_1 t^{mu_1}, ...)``,
* the Gauss hypergeometric function on ``[0, 1]`` and the tail factor derived
  from it that enters step-weighted calibration curves,
* a real-line integral representation of the multi-order function with
  negative power arguments (obtained by collapsing a Hankel contour), used
  both as an independent cross-check and as the workhorse for large negative
  arguments,
* the unique positive root of a signed power sum with one sign change,
* the closed-form solution of the homogeneous constant-coefficient
  initial-value problem, and the inverse of the constant-coefficient
  multiterm operator via a convolution integral.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import EvaluationError, RootNotFoundError

__all__ = [
    "MLParams",
    "FKernelParams",
    "SignedPowerSum",
    "ml_two_param",
    "mml_series",
    "f_kernel",
    "gauss_2f1",
    "rho",
    "mml_contour",
    "sign_change_root",
    "homogeneous_solution",
    "constant_coeff_inverse",
    "ml_lower_bound",
]

# Series truncation: an outer term is negligible once it drops below
# _SERIES_RTOL * (1 + |partial sum|) for _SERIES_RUN consecutive indices.
_SERIES_RTOL = 1e-16
_SERIES_RUN = 3
_OUTER_KMAX = 400
_LN_OVERFLOW = 700.0


def _rgamma(x: float) -> float:
    """Reciprocal gamma function, zero at the poles of Gamma."""
    if x <= 0.0 and x == round(x):
        return 0.0
    if x > 171.6:
        return 0.0
    if x > 0.0:
        return 1.0 / math.gamma(x)
    # Reflection keeps negative non-integer arguments stable.
    return math.sin(math.pi * x) * math.gamma(1.0 - x) / math.pi


def _rgamma_ln(x: float) -> tuple[float, float]:
    """(sign, ln magnitude) of 1/Gamma(x); sign 0 at poles."""
    if x <= 0.0 and x == round(x):
        return 0.0, -math.inf
    if x > 0.0:
        return 1.0, -math.lgamma(x)
    s = math.sin(math.pi * x)
    sign = 1.0 if s > 0 else -1.0
    return sign, math.log(abs(s) / math.pi) + math.lgamma(1.0 - x)


# --------------------------------------------------------------------------
# parameter bundles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MLParams:
    """Argument bundle of the multi-order Mittag-Leffler function.

    ``beta0`` is the offset in the gamma denominator, ``orders[j]`` the weight
    multiplying the j-th summation index, and ``args[j]`` the j-th power
    argument.
    """

    beta0: float
    orders: tuple[float, ...]
    args: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(float(b) for b in self.orders))
        object.__setattr__(self, "args", tuple(float(s) for s in self.args))
        if not 0.0 < self.beta0 < 2.0:
            raise ValueError(f"beta0 must lie in (0, 2), got {self.beta0}")
        if len(self.orders) == 0 or len(self.orders) != len(self.args):
            raise ValueError("orders and args must have equal positive length")
        if any(not 0.0 < b <= 1.0 for b in self.orders):
            raise ValueError(f"every order must lie in (0, 1], got {self.orders}")


@dataclass(frozen=True)
class FKernelParams:
    """Arguments of the kernel ``t^{beta-1} E_{(mu),beta}(-a_1 t^{mu_1}, ...)``."""

    mus: tuple[float, ...]
    beta: float
    as_: tuple[float, ...]
    t: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "mus", tuple(float(m) for m in self.mus))
        object.__setattr__(self, "as_", tuple(float(a) for a in self.as_))
        if len(self.mus) != len(self.as_):
            raise ValueError("mus and as_ must have equal length")
        if any(not 0.0 < m <= 1.0 for m in self.mus):
            raise ValueError(f"every mu must lie in (0, 1], got {self.mus}")
        if not self.beta < 2.0:
            raise ValueError(f"beta must be < 2, got {self.beta}")
        if not self.t > 0.0:
            raise ValueError(f"t must be positive, got {self.t}")


@dataclass(frozen=True)
class SignedPowerSum:
    """``S(s) = sum_j k_j s^{gamma_j}`` with one sign change in the coefficients.

    Exponents satisfy ``0 = gamma_0 < gamma_1 < ... <= 1``; coefficients are
    positive up to some index m and negative afterwards, with at least one
    negative coefficient.  Such a sum has exactly one positive root.
    """

    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", tuple(float(g) for g in self.exponents))
        object.__setattr__(self, "coefficients", tuple(float(k) for k in self.coefficients))
        g, k = self.exponents, self.coefficients
        if len(g) != len(k) or len(g) < 2:
            raise ValueError("need matching exponents/coefficients with >= 2 terms")
        if g[0] != 0.0 or g[-1] > 1.0 or any(a >= b for a, b in zip(g, g[1:])):
            raise ValueError("exponents must be strictly increasing with gamma_0 = 0 and gamma_n <= 1")
        if k[0] <= 0.0 or k[-1] >= 0.0 or any(x == 0.0 for x in k):
            raise ValueError("coefficients must start positive, end negative, no zeros")
        sign_flips = sum(1 for a, b in zip(k, k[1:]) if (a > 0) != (b > 0))
        if sign_flips != 1:
            raise ValueError("coefficients must change sign exactly once")

    def __call__(self, s) -> float:
        g = np.asarray(self.exponents)
        k = np.asarray(self.coefficients)
        s = np.asarray(s, dtype=float)
        return (k * np.power(s[..., None], g)).sum(axis=-1)


# --------------------------------------------------------------------------
# two-parameter Mittag-Leffler function
# --------------------------------------------------------------------------


def _series_two_param(alpha: float, beta: float, x: float, kmax: int = 20000) -> float:
    """Straight Taylor series; caller is responsible for cancellation safety."""
    if x == 0.0:
        return _rgamma(beta)
    ln_ax = math.log(abs(x))
    neg = x < 0.0
    total = 0.0
    run = 0
    for k in range(kmax):
        ln_t = k * ln_ax - math.lgamma(alpha * k + beta)
        if ln_t > _LN_OVERFLOW:
            raise EvaluationError(
                f"series term overflow for E_({alpha},{beta})({x})",
                partial=total, terms=k)
        term = math.exp(ln_t)
        if neg and (k % 2 == 1):
            term = -term
        total += term
        if abs(term) <= _SERIES_RTOL * (1.0 + abs(total)):
            run += 1
            if run >= _SERIES_RUN:
                return total
        else:
            run = 0
    raise EvaluationError(
        f"series for E_({alpha},{beta})({x}) not converged in {kmax} terms",
        partial=total, terms=kmax)


def _asymptotic_two_param(alpha: float, beta: float, x: float) -> float:
    """Divergent large-|x| expansion for x << 0, truncated at its smallest term."""
    s = 0.0
    prev_mag = math.inf
    k = 1
    while k <= 300:
        sign_rg, ln_rg = _rgamma_ln(beta - alpha * k)
        ln_mag = -k * math.log(abs(x)) + ln_rg
        mag = math.exp(ln_mag) if ln_mag > -745 else 0.0
        if mag >= prev_mag:
            break
        term = -sign_rg * mag * ((-1.0) ** k if x < 0 else 1.0)
        s += term
        prev_mag = mag
        k += 1
    if prev_mag > 1e-9 * (abs(s) + 1e-300):
        raise EvaluationError(
            f"asymptotic tail floor {prev_mag:.2e} too large for E_({alpha},{beta})({x})",
            partial=s, terms=k, err_estimate=prev_mag)
    return s


def ml_two_param(alpha: float, beta: float, x: float) -> float:
    """Two-parameter Mittag-Leffler function ``E_{alpha,beta}(x)`` for real x.

    Dispatches between the Taylor series (small arguments), elementary closed
    forms (``alpha = 1``), a collapsed-contour integral (large negative
    arguments) and the divergent asymptotic expansion as a fallback.
    Relative accuracy is about 1e-10 for ``|x| <= 50``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if not beta > 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    if x == 0.0:
        return _rgamma(beta)
    if alpha == 1.0:
        if beta == 1.0:
            if x > _LN_OVERFLOW:
                raise EvaluationError(f"exp overflow at x={x}")
            return math.exp(x)
        if beta == 2.0:
            if x > _LN_OVERFLOW:
                raise EvaluationError(f"exp overflow at x={x}")
            return math.expm1(x) / x
        val = float(special.hyp1f1(1.0, beta, x)) * _rgamma(beta)
        if not math.isfinite(val):
            raise EvaluationError(f"hyp1f1 path failed for E_(1,{beta})({x})")
        return val
    if x > 0.0:
        return _series_two_param(alpha, beta, x)
    # x < 0: the Taylor series loses roughly |x|^(1/alpha)/ln(10) digits to
    # cancellation, so it is only used while that exponent stays small.
    if abs(x) ** (1.0 / alpha) <= 10.0:
        return _series_two_param(alpha, beta, x)
    if beta < 1.0 + alpha:
        val, err = _tilde_contour(1.0, beta, -x, (), (alpha,))
        if err > 1e-10 * max(abs(val), 1e-290):
            raise EvaluationError(
                f"contour quadrature error {err:.2e} too large for E_({alpha},{beta})({x})",
                partial=val, err_estimate=err)
        return val
    return _asymptotic_two_param(alpha, beta, x)


# --------------------------------------------------------------------------
# multi-order series
# --------------------------------------------------------------------------


def _compositions(k: int, parts: int):
    """Yield all tuples of `parts` nonnegative integers summing to k."""
    if parts == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, parts - 1):
            yield (first, *rest)


def _outer_term_general(k: int, beta0: float, orders, ln_abs, signs) -> float:
    total = 0.0
    for comp in _compositions(k, len(orders)):
        ln_t = math.lgamma(k + 1)
        sgn = 1.0
        gam_arg = beta0
        for kj, b, la, sg in zip(comp, orders, ln_abs, signs):
            ln_t += kj * la - math.lgamma(kj + 1)
            gam_arg += b * kj
            if sg < 0 and kj % 2 == 1:
                sgn = -sgn
        ln_t -= math.lgamma(gam_arg)
        if ln_t > _LN_OVERFLOW:
            raise EvaluationError(f"series term overflow at outer index {k}")
        total += sgn * math.exp(ln_t)
    return total


def _outer_term_pair(k: int, beta0: float, orders, ln_abs, signs) -> float:
    """Vectorised inner sum for exactly two orders."""
    k1 = np.arange(k + 1, dtype=float)
    k2 = k - k1
    ln_t = (special.gammaln(k + 1.0) - special.gammaln(k1 + 1.0)
            - special.gammaln(k2 + 1.0)
            + k1 * ln_abs[0] + k2 * ln_abs[1]
            - special.gammaln(beta0 + orders[0] * k1 + orders[1] * k2))
    if np.max(ln_t) > _LN_OVERFLOW:
        raise EvaluationError(f"series term overflow at outer index {k}")
    sgn = np.ones(k + 1)
    if signs[0] < 0:
        sgn[1::2] *= -1.0  # odd k1
    if signs[1] < 0:
        sgn *= np.where(k2.astype(int) % 2 == 1, -1.0, 1.0)
    return float(np.sum(sgn * np.exp(ln_t)))


def _outer_term_triple(k: int, beta0: float, orders, ln_abs, signs) -> float:
    """Vectorised inner sum for exactly three orders."""
    k1, k2 = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
    mask = k1 + k2 <= k
    k1 = k1[mask].astype(float)
    k2 = k2[mask].astype(float)
    k3 = k - k1 - k2
    ln_t = (special.gammaln(k + 1.0)
            - special.gammaln(k1 + 1.0) - special.gammaln(k2 + 1.0)
            - special.gammaln(k3 + 1.0)
            + k1 * ln_abs[0] + k2 * ln_abs[1] + k3 * ln_abs[2]
            - special.gammaln(beta0 + orders[0] * k1 + orders[1] * k2
                              + orders[2] * k3))
    if ln_t.size and np.max(ln_t) > _LN_OVERFLOW:
        raise EvaluationError(f"series term overflow at outer index {k}")
    sgn = np.ones(ln_t.size)
    for kk, s in zip((k1, k2, k3), signs):
        if s < 0:
            sgn *= np.where(kk.astype(int) % 2 == 1, -1.0, 1.0)
    return float(np.sum(sgn * np.exp(ln_t)))


def mml_series(p: MLParams) -> float:
    """Multi-order Mittag-Leffler function via its defining double series.

    The outer sum is truncated once its level contribution stays below
    ``1e-16 * (1 + |partial|)`` for three consecutive levels; the level cap
    is 400.  The value is invariant under simultaneous permutations of
    (orders, args).
    """
    # Arguments equal to zero contribute only through k_j = 0 and may be pruned.
    kept = [(b, s) for b, s in zip(p.orders, p.args) if s != 0.0]
    if not kept:
        return _rgamma(p.beta0)
    orders = [b for b, _ in kept]
    ln_abs = [math.log(abs(s)) for _, s in kept]
    signs = [1.0 if s > 0 else -1.0 for _, s in kept]

    term_of = {2: _outer_term_pair, 3: _outer_term_triple}.get(
        len(kept), _outer_term_general)
    total = 0.0
    peak = 0.0
    run = 0
    for k in range(_OUTER_KMAX + 1):
        t_k = term_of(k, p.beta0, orders, ln_abs, signs)
        total += t_k
        peak = max(peak, abs(t_k))
        if abs(t_k) <= _SERIES_RTOL * (1.0 + abs(total)):
            run += 1
            if run >= _SERIES_RUN:
                # The alternating sum loses roughly peak/|total| in relative
                # accuracy; refuse to return numerically meaningless values.
                err_rel = peak * 1e-13 / max(abs(total), 1e-300)
                if err_rel > 1e-5:
                    raise EvaluationError(
                        f"cancellation of order {err_rel:.1e} destroyed the "
                        "multi-order series in double precision",
                        partial=total, terms=k, err_estimate=err_rel)
                return total
        else:
            run = 0
    raise EvaluationError(
        f"multi-order series not converged within {_OUTER_KMAX} outer terms",
        partial=total, terms=_OUTER_KMAX)


def f_kernel(p: FKernelParams) -> float:
    """Power-weighted kernel ``t^{beta-1} E_{(mu),beta}(-a_1 t^{mu_1}, ...)``.

    Nonnegative whenever ``0 <= mu_m < ... < mu_1 <= beta <= 1`` with all
    ``a_j > 0`` (complete monotonicity of the kernel).
    """
    if not 0.0 < p.beta:
        # The series itself needs a positive gamma offset.
        raise ValueError(f"kernel evaluation requires beta > 0, got {p.beta}")
    args = tuple(-a * p.t ** m for a, m in zip(p.as_, p.mus))
    e = mml_series(MLParams(beta0=p.beta, orders=p.mus, args=args))
    return p.t ** (p.beta - 1.0) * e


# --------------------------------------------------------------------------
# Gauss 2F1 and the calibration tail factor
# --------------------------------------------------------------------------


def gauss_2f1(a: float, b: float, c: float, s: float) -> float:
    """Gauss hypergeometric function ``2F1(a, b; c; s)`` on ``s in [0, 1]``.

    At ``s = 1`` the Gauss summation closed form
    ``Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))`` is used, which
    requires ``c - a - b > 0``.
    """
    if c <= 0.0 and c == round(c):
        raise ValueError(f"c must not be a nonpositive integer, got {c}")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    if a == 0.0 or b == 0.0:
        return 1.0
    if s == 1.0:
        if not c - a - b > 0.0:
            raise ValueError(f"2F1 at s=1 requires c-a-b > 0, got {c - a - b}")
        return math.gamma(c) * math.gamma(c - a - b) * _rgamma(c - a) * _rgamma(c - b)
    val = float(special.hyp2f1(a, b, c, s))
    if not math.isfinite(val):
        raise EvaluationError(f"hyp2f1({a},{b},{c},{s}) did not evaluate")
    return val


def rho(i_order: float, alpha1: float, s: float) -> float:
    """Tail factor ``rho_i(s)`` of the step-weighted calibration curve.

    For ``s >= 1`` it vanishes; on ``(0, 1)`` it equals
    ``2F1(a_i, -beta; a_1; s) - Gamma(a_1)Gamma(1-a_i)/Gamma(a_1-a_i) s^beta``
    with ``beta = 1 - a_1``, and lies in ``[0, 1)``.
    """
    if not 0.0 < i_order <= alpha1 < 1.0:
        raise ValueError(f"need 0 < i_order <= alpha1 < 1, got ({i_order}, {alpha1})")
    if s < 0.0:
        raise ValueError(f"s must be nonnegative, got {s}")
    if s >= 1.0:
        return 0.0
    beta = 1.0 - alpha1
    if i_order == alpha1:
        # 2F1(a, b; a; s) = (1-s)^(-b) and the gamma prefactor vanishes.
        return (1.0 - s) ** beta
    if s == 0.0:
        return 1.0
    val = (gauss_2f1(i_order, -beta, alpha1, s)
           - math.gamma(alpha1) * math.gamma(1.0 - i_order)
           * _rgamma(alpha1 - i_order) * s ** beta)
    if val < 0.0:
        if val < -1e-10:
            raise EvaluationError(f"rho({i_order},{alpha1},{s}) = {val} < 0")
        val = 0.0
    return val


# --------------------------------------------------------------------------
# collapsed-contour representation
# --------------------------------------------------------------------------


def _tilde_contour(t: float, beta: float, lam: float, q_tail: Sequence[float],
                   alphas: Sequence[float]) -> tuple[float, float]:
    """Real-line integral for E_{(a1, a1-al, ..., a1-a2), beta} with negative
    power arguments ``(-lam t^a1, -q_l t^{a1-a_l}, ..., -q_2 t^{a1-a2})``.

    Valid for ``0 < beta < 1 + a1`` and ``lam > 0``; returns (value, error
    estimate).  The integrable endpoint factor ``s^{(1-beta)/a1}`` is handled
    by weighted quadrature on [0, 1]; the tail is truncated where the
    exponential factor is below 3e-20.
    """
    a1 = alphas[0]
    e0 = (1.0 - beta) / a1
    gammas = [a / a1 for a in alphas[1:]]              # tail exponents in (0, 1)
    v_coeffs = [q * math.sin(math.pi * (beta - a1 + a))
                for q, a in zip(q_tail, alphas[1:])]
    v_const = lam * math.sin(math.pi * (beta - a1))
    sin_b = math.sin(math.pi * beta)
    xi_coeffs = [q * complex(math.cos(math.pi * (a1 - a)), math.sin(math.pi * (a1 - a)))
                 for q, a in zip(q_tail, alphas[1:])]
    xi_const = lam * complex(math.cos(math.pi * a1), math.sin(math.pi * a1))
    inv_a1 = 1.0 / a1

    def smooth_part(s: float) -> float:
        xi = xi_const
        v = s * sin_b + v_const
        for g, xc, vc in zip(gammas, xi_coeffs, v_coeffs):
            sg = s ** g
            xi += xc * sg
            v += vc * sg
        den = (s + xi.real) ** 2 + xi.imag ** 2
        arg = t * s ** inv_a1
        e = math.exp(-arg) if arg < 745.0 else 0.0
        return e * v / den

    s_cut = (45.0 / t) ** a1
    b_split = min(1.0, s_cut)
    # Split at the sign change of the numerator when it has the one-flip
    # structure; purely a quadrature aid.
    pts = None
    if s_cut > b_split:
        root = _v_sign_change(v_const, v_coeffs, gammas, sin_b)
        if root is not None and b_split < root < s_cut:
            pts = [root]

    def integrate_parts(epsabs: float) -> tuple[float, float]:
        val1, err1 = integrate.quad(smooth_part, 0.0, b_split,
                                    weight="alg", wvar=(e0, 0.0),
                                    epsabs=epsabs, epsrel=1e-12, limit=200)
        val2 = err2 = 0.0
        if s_cut > b_split:
            val2, err2 = integrate.quad(lambda s: s ** e0 * smooth_part(s),
                                        b_split, s_cut, points=pts,
                                        epsabs=epsabs, epsrel=1e-12, limit=200)
        return val1 + val2, err1 + err2

    total, err = integrate_parts(1e-14)
    if total != 0.0 and err > 1e-12 * abs(total):
        # tiny integrals hit the absolute-error floor of the first pass;
        # re-integrate with the tolerance scaled to the known magnitude
        total, err = integrate_parts(max(1e-290, 1e-13 * abs(total)))
    scale = t ** (1.0 - beta) / (a1 * math.pi)
    return scale * total, abs(scale) * err


def _v_sign_change(v_const: float, v_coeffs: Sequence[float],
                   gammas: Sequence[float], sin_b: float) -> float | None:
    """Root of the contour numerator when it is a one-flip signed power sum."""
    terms = sorted([(0.0, v_const)]
                   + [(g, c) for g, c in zip(gammas, v_coeffs) if c != 0.0]
                   + [(1.0, sin_b)])
    exps = tuple(g for g, _ in terms)
    coeffs = tuple(c for _, c in terms)
    try:
        spsum = SignedPowerSum(exps, coeffs)
        return sign_change_root(spsum)
    except (ValueError, RootNotFoundError):
        return None


def mml_contour(t: float, beta: float, lambda_: float, qs: Sequence[float],
                alphas: Sequence[float]) -> float:
    """Contour-integral evaluation of the multi-order function
    ``E_{(a1, a1-al, ..., a1-a2), beta}(-lambda t^a1, -q_l t^{a1-a_l}, ...)``.

    ``alphas`` lists the decreasing orders ``a1 > ... > al`` in (0, 1);
    ``qs`` the positive coefficients ``(q_2, ..., q_l)`` (empty for l = 1).
    Requires ``beta in (1, 1 + a1)`` and ``lambda_ > 0``; the result is
    strictly positive.
    """
    alphas = tuple(float(a) for a in alphas)
    qs = tuple(float(q) for q in qs)
    if len(qs) != len(alphas) - 1:
        raise ValueError("qs must list one coefficient per order beyond the first")
    if any(a2 >= a1 for a1, a2 in zip(alphas, alphas[1:])) or not all(0 < a < 1 for a in alphas):
        raise ValueError(f"orders must be strictly decreasing in (0, 1), got {alphas}")
    if any(q <= 0 for q in qs):
        raise ValueError("all coefficients must be positive")
    if not lambda_ > 0.0:
        raise ValueError(f"lambda_ must be positive, got {lambda_}")
    a1 = alphas[0]
    if not 1.0 < beta < 1.0 + a1:
        raise ValueError(f"beta must lie in (1, 1+alpha1) = (1, {1 + a1}), got {beta}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    val, err = _tilde_contour(t, beta, lambda_, qs, alphas)
    if err > 1e-8 * max(abs(val), 1e-290):
        raise EvaluationError(
            f"contour quadrature error {err:.2e} exceeds 1e-8 of result {val:.6e}",
            partial=val, err_estimate=err)
    return val


# --------------------------------------------------------------------------
# root of a signed power sum
# --------------------------------------------------------------------------


def sign_change_root(p: SignedPowerSum) -> float:
    """Unique positive root of ``S(s) = sum k_j s^{gamma_j}``.

    ``S`` is positive left of the root and negative right of it.  A geometric
    bracket expansion from [1e-8, 1] is followed by a safeguarded bracketing
    solve to machine resolution.
    """
    lo = 1e-8
    while p(lo) <= 0.0:
        lo /= 16.0
        if lo < 1e-300:
            raise RootNotFoundError("no positive values found near s = 0")
    hi = max(1.0, 2.0 * lo)
    while p(hi) >= 0.0:
        hi *= 4.0
        if hi > 1e12:
            raise RootNotFoundError("no sign change found below s = 1e12")
    root = optimize.brentq(p, lo, hi, xtol=1e-280, rtol=8.9e-16, maxiter=300)
    return float(root)


# --------------------------------------------------------------------------
# constant-coefficient solutions
# --------------------------------------------------------------------------


def _kernel_args(alphas: Sequence[float], qs: Sequence[float],
                 lambda_: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Kernel orders ``(a1, a1-al, ..., a1-a2)`` and the matching coefficients
    ``(lambda, q_l, ..., q_2)``."""
    a1 = alphas[0]
    mus = (a1,) + tuple(a1 - a for a in reversed(alphas[1:]))
    as_ = (lambda_,) + tuple(reversed(qs[1:]))
    return mus, as_


def _solution_kernel_ml(t: float, beta: float, lambda_: float,
                        qs: Sequence[float], alphas: Sequence[float]) -> float:
    """``E_{(a1, a1-al, ..., a1-a2), beta}(-lambda t^a1, -q_l t^{a1-a_l}, ...)``
    for the constant-coefficient solution kernels.

    Small arguments go through the series; larger ones through the collapsed
    contour, whose accuracy does not degrade with the argument size (the
    alternating series loses roughly ``exp(peak term)`` digits to
    cancellation and its outer cap caps the reachable argument range).
    """
    mus, as_ = _kernel_args(alphas, qs, lambda_)
    args = tuple(-a * t ** m for a, m in zip(as_, mus))
    if sum(abs(s) for s in args) <= 1.0 or lambda_ * t == 0.0:
        return mml_series(MLParams(beta0=beta, orders=mus, args=args))
    val, err = _tilde_contour(t, beta, lambda_, tuple(qs[1:]), alphas)
    if err > 1e-9 * max(abs(val), 1e-290):
        raise EvaluationError(
            f"kernel contour quadrature error {err:.2e} too large",
            partial=val, err_estimate=err)
    return val


def _validate_constant_problem(qs: Sequence[float], alphas: Sequence[float]) -> None:
    if len(qs) != len(alphas):
        raise ValueError("qs and alphas must have equal length")
    if abs(qs[0] - 1.0) > 1e-12:
        raise ValueError(f"q_1 must be normalised to 1, got {qs[0]}")
    if any(q <= 0 for q in qs):
        raise ValueError("all coefficients must be positive constants")
    if not all(0.0 < a < 1.0 for a in alphas) or any(
            a2 >= a1 for a1, a2 in zip(alphas, alphas[1:])):
        raise ValueError(f"orders must be strictly decreasing in (0, 1), got {alphas}")


def homogeneous_solution(t: float, lambda_: float, qs: Sequence[float],
                         alphas: Sequence[float]) -> float:
    """Solution ``y(t)`` of the homogeneous constant-coefficient problem
    with ``y(0) = 1``: a combination of power-weighted kernels.

    ``qs = (1, q_2, ..., q_l)`` and ``alphas = (a_1 > ... > a_l)`` in (0, 1).
    The value lies in [0, 1] and decays no faster than the single-order
    comparison solutions.
    """
    qs = tuple(float(q) for q in qs)
    alphas = tuple(float(a) for a in alphas)
    _validate_constant_problem(qs, alphas)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if lambda_ < 0.0:
        raise ValueError(f"lambda_ must be nonnegative, got {lambda_}")
    if t == 0.0 or lambda_ == 0.0:
        return 1.0
    a1 = alphas[0]
    total = _solution_kernel_ml(t, 1.0, lambda_, qs, alphas)
    for a_j, q_j in zip(alphas[1:], qs[1:]):
        total += (q_j * t ** (a1 - a_j)
                  * _solution_kernel_ml(t, 1.0 + a1 - a_j, lambda_, qs, alphas))
    return total


def constant_coeff_inverse(v: Callable[[float], float], t: float, lambda_: float,
                           qs: Sequence[float], alphas: Sequence[float],
                           w0: float, quad_tol: float = 1e-10) -> float:
    """Apply the inverse of the constant-coefficient multiterm operator.

    Returns ``w(t) = w0 + integral_0^t K(s) [v(t-s) - lambda w0] ds`` where K
    is the power-weighted kernel of order offset ``a1``.  The endpoint
    singularity ``s^{a1-1}`` is removed by the substitution ``s = sigma^{1/a1}``.
    """
    qs = tuple(float(q) for q in qs)
    alphas = tuple(float(a) for a in alphas)
    _validate_constant_problem(qs, alphas)
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0.0:
        return float(w0)
    a1 = alphas[0]
    inv_a1 = 1.0 / a1

    def integrand(sigma: float) -> float:
        s = sigma ** inv_a1
        e_val = _solution_kernel_ml(s, a1, lambda_, qs, alphas)
        return e_val * (v(t - s) - lambda_ * w0)

    upper = t ** a1
    val, err = integrate.quad(integrand, 0.0, upper,
                              epsabs=quad_tol, epsrel=quad_tol, limit=400)
    if err > max(10.0 * quad_tol, 1e-8 * abs(val)) * max(1.0, abs(val)):
        raise EvaluationError(
            f"convolution quadrature error {err:.2e} too large",
            partial=val, err_estimate=err)
    return float(w0) + val / a1


def ml_lower_bound(t: float, w0: float, lambda_: float, q_mins: Sequence[float],
                   alphas: Sequence[float]) -> float:
    """Comparison lower bound ``w0 * max_j E_{a_j,1}(-lambda t^{a_j} / qmin_j)``.

    A term with ``qmin_j = 0`` contributes zero.  Orders may include 1 (the
    exponential case).
    """
    q_mins = tuple(float(q) for q in q_mins)
    alphas = tuple(float(a) for a in alphas)
    if len(q_mins) != len(alphas):
        raise ValueError("q_mins and alphas must have equal length")
    if any(q < 0 for q in q_mins):
        raise ValueError("q_mins must be nonnegative")
    if t < 0.0 or w0 < 0.0 or lambda_ < 0.0:
        raise ValueError("t, w0 and lambda_ must be nonnegative")
    if t == 0.0:
        return float(w0)
    best = 0.0
    for a_j, q_j in zip(alphas, q_mins):
        if q_j == 0.0:
            continue
        best = max(best, ml_two_param(a_j, 1.0, -lambda_ * t ** a_j / q_j))
    return w0 * best
