"""Closed-form covariance kernels of the mixed sub-fractional family.

Every function here is a pure, deterministic evaluation of a closed form:
plain and sub-fractional Brownian covariances, their weighted mixtures,
increment second moments and envelopes, lag covariances of unit
increments, the stationary mixed-fBm comparator, and the factorization
residual used by the Markov test.

Powers x^(2H) are evaluated as exp(2H*log(x)) with an explicit x = 0
branch.  Differences of nearly equal large powers are grouped pairwise
before summation; at large times the pairing, not the raw eight-term sum,
is what keeps the increment covariances meaningful.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .process import (
    HURST_RANGE_MSG,
    IncrementWindow,
    ProcessSpec,
    bound_constants,
)

__all__ = [
    "fbm_cov",
    "sfbm_cov",
    "msfbm_cov",
    "msfbm_var",
    "mfbm_cov",
    "increment_second_moment",
    "increment_bounds",
    "increment_cov",
    "increment_cov_component",
    "lag_cov_c",
    "lag_cov_series",
    "lag_cov_c_asymptotic",
    "mfbm_lag_cov_r",
    "stationarity_gap",
    "markov_residual",
    "conditional_variance",
    "rescale_coeffs",
    "kernel_scale",
]


def _check_hurst(h: float) -> float:
    h = float(h)
    if not (0.0 < h < 1.0):
        raise ValueError(HURST_RANGE_MSG)
    return h


def _p2h(x: float, two_h: float) -> float:
    """x^(2h) for x >= 0, with 0^(2h) = 0."""
    if x == 0.0:
        return 0.0
    return math.exp(two_h * math.log(x))


def _p2h_array(x: np.ndarray, two_h: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 0.0, np.exp(two_h * np.log(safe)))


def fbm_cov(h: float, s: float, t: float) -> float:
    """Fractional Brownian covariance (|t|^2h + |s|^2h - |t-s|^2h)/2 on the line."""
    h = _check_hurst(h)
    two_h = 2.0 * h
    s = float(s)
    t = float(t)
    return 0.5 * (_p2h(abs(t), two_h) + _p2h(abs(s), two_h) - _p2h(abs(t - s), two_h))


def _sfbm_cov_unchecked(two_h: float, s: float, t: float) -> float:
    return (
        _p2h(s, two_h)
        + _p2h(t, two_h)
        - 0.5 * (_p2h(s + t, two_h) + _p2h(abs(t - s), two_h))
    )


def sfbm_cov(h: float, s: float, t: float) -> float:
    """Sub-fractional covariance s^2h + t^2h - ((s+t)^2h + |t-s|^2h)/2, s,t >= 0."""
    h = _check_hurst(h)
    s = float(s)
    t = float(t)
    if s < 0.0 or t < 0.0:
        raise ValueError("times must be nonnegative")
    return _sfbm_cov_unchecked(2.0 * h, s, t)


def msfbm_cov(spec: ProcessSpec, s: float, t: float) -> float:
    """Mixture covariance sum(a_i^2 * sfbm_cov(H_i, s, t))."""
    s = float(s)
    t = float(t)
    if s < 0.0 or t < 0.0:
        raise ValueError("times must be nonnegative")
    return sum(
        a * a * _sfbm_cov_unchecked(2.0 * h, s, t)
        for a, h in zip(spec.coeffs, spec.hurst)
    )


def msfbm_var(spec: ProcessSpec, t: float) -> float:
    """Variance sum(a_i^2 * (2 - 2^(2H_i - 1)) * t^(2H_i)) at time t >= 0."""
    t = float(t)
    if t < 0.0:
        raise ValueError("times must be nonnegative")
    out = 0.0
    for a, h in zip(spec.coeffs, spec.hurst):
        two_h = 2.0 * h
        out += a * a * (2.0 - math.exp((two_h - 1.0) * math.log(2.0))) * _p2h(t, two_h)
    return out


def mfbm_cov(spec: ProcessSpec, s: float, t: float) -> float:
    """Mixed fractional (stationary-increment comparator) covariance."""
    s = float(s)
    t = float(t)
    if s < 0.0 or t < 0.0:
        raise ValueError("times must be nonnegative")
    return sum(a * a * fbm_cov(h, s, t) for a, h in zip(spec.coeffs, spec.hurst))


def _check_increment_times(s: float, t: float) -> tuple[float, float]:
    s = float(s)
    t = float(t)
    if s < 0.0 or t < 0.0:
        raise ValueError("times must be nonnegative")
    if s > t:
        raise ValueError("increment requires s <= t")
    return s, t


def increment_second_moment(spec: ProcessSpec, s: float, t: float) -> float:
    """E(S_t - S_s)^2 for 0 <= s <= t, component by component.

    Clamped at zero: for s = t the exact value is 0 and roundoff must not
    surface as a negative variance.
    """
    s, t = _check_increment_times(s, t)
    out = 0.0
    for a, h in zip(spec.coeffs, spec.hurst):
        two_h = 2.0 * h
        c = math.exp((two_h - 1.0) * math.log(2.0))
        out += a * a * (
            _p2h(t + s, two_h)
            + _p2h(t - s, two_h)
            - c * (_p2h(t, two_h) + _p2h(s, two_h))
        )
    return max(out, 0.0)


def increment_bounds(spec: ProcessSpec, s: float, t: float) -> tuple[float, float]:
    """Two-sided envelope (lower, upper) for the increment second moment."""
    s, t = _check_increment_times(s, t)
    consts = bound_constants(spec)
    dt = t - s
    lower = 0.0
    upper = 0.0
    for a, h, g, v in zip(spec.coeffs, spec.hurst, consts.gamma, consts.nu):
        base = a * a * _p2h(dt, 2.0 * h)
        lower += g * base
        upper += v * base
    return lower, upper


def increment_cov_component(h: float, w: IncrementWindow) -> float:
    """Unit-weight contribution of one Hurst index to the increment covariance.

    Pairwise grouping of the eight power terms; the same grouping is reused
    by the integer-lag closed form so the two stay consistent at full
    precision.
    """
    h = _check_hurst(h)
    two_h = 2.0 * h
    u, v, s, t = w.u, w.v, w.s, w.t
    d1 = _p2h(t + u, two_h) - _p2h(t + v, two_h)
    d2 = _p2h(t - u, two_h) - _p2h(t - v, two_h)
    d3 = _p2h(s + v, two_h) - _p2h(s + u, two_h)
    d4 = _p2h(s - v, two_h) - _p2h(s - u, two_h)
    return 0.5 * ((d1 + d2) + (d3 + d4))


def increment_cov(spec: ProcessSpec, w: IncrementWindow) -> float:
    """Covariance of increments over the non-overlapping window (u,v) x (s,t)."""
    return sum(
        a * a * increment_cov_component(h, w)
        for a, h in zip(spec.coeffs, spec.hurst)
    )


def kernel_scale(spec: ProcessSpec, tmax: float) -> float:
    """Natural magnitude of kernel terms at times up to ``tmax``.

    Identity checks on cancellation-prone sums are meaningful relative to
    this scale, not to the (possibly vanishing) result.
    """
    tmax = abs(float(tmax))
    out = 0.0
    for a, h in zip(spec.coeffs, spec.hurst):
        out += a * a * max(1.0, _p2h(2.0 * tmax, 2.0 * h))
    return out


def _lag_window(x: float, n: int) -> IncrementWindow:
    return IncrementWindow(x, x + 1.0, x + n, x + n + 1.0)


def _check_lag(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("lag n must be >= 1 (n = 0 overlaps the base window)")
    return n


def lag_cov_c(spec: ProcessSpec, x: float, n: int) -> float:
    """Lag covariance C(x, n) of unit increments at (x, x+1) and (x+n, x+n+1).

    Integer x additionally evaluates the six-term closed form and asserts
    that it agrees with the window evaluation.
    """
    n = _check_lag(n)
    x = float(x)
    if x < 0.0:
        raise ValueError("times must be nonnegative")
    value = increment_cov(spec, _lag_window(x, n))
    if x.is_integer():
        closed = 0.0
        big = 2.0 * x + n
        for a, h in zip(spec.coeffs, spec.hurst):
            two_h = 2.0 * h
            d1 = _p2h(big + 1.0, two_h) - _p2h(big + 2.0, two_h)
            d2 = _p2h(n + 1.0, two_h) - _p2h(float(n), two_h)
            d3 = _p2h(big + 1.0, two_h) - _p2h(big, two_h)
            d4 = _p2h(n - 1.0, two_h) - _p2h(float(n), two_h)
            closed += a * a * (0.5 * ((d1 + d2) + (d3 + d4)))
        scale = kernel_scale(spec, x + n + 1.0)
        assert math.isclose(closed, value, rel_tol=1e-12, abs_tol=1e-12 * scale), (
            f"closed form {closed!r} deviates from window form {value!r}"
        )
    return value


def lag_cov_series(spec: ProcessSpec, p: int, ns: Sequence[int]) -> np.ndarray:
    """C(p, n) over many integer lags, evaluated for large-lag tails.

    Writes C(p, n) as a difference of second central differences of
    x^(2H) and expands each through expm1/log1p.  Relative accuracy is
    ~1e-12 at n ~ 1e2 and degrades smoothly to ~1e-5 at n ~ 1e5; the raw
    eight-term sum would have lost every digit there.
    """
    p = int(p)
    if p < 0:
        raise ValueError("p must be a nonnegative integer")
    ns = np.asarray(ns, dtype=float)
    if ns.size and ns.min() < 1:
        raise ValueError("lag n must be >= 1 (n = 0 overlaps the base window)")

    def second_diff(m: np.ndarray, two_h: float) -> np.ndarray:
        # m^2h * ((1+1/m)^2h + (1-1/m)^2h - 2); exact at m = 1.
        inv = 1.0 / m
        with np.errstate(divide="ignore"):
            bracket = np.expm1(two_h * np.log1p(inv)) + np.expm1(two_h * np.log1p(-inv))
        return _p2h_array(m, two_h) * bracket

    out = np.zeros_like(ns)
    far = ns + (2 * p + 1)
    for a, h in zip(spec.coeffs, spec.hurst):
        two_h = 2.0 * h
        out += (a * a / 2.0) * (second_diff(ns, two_h) - second_diff(far, two_h))
    return out


def lag_cov_c_asymptotic(spec: ProcessSpec, p: int, n: int) -> float:
    """Leading large-n term 2(1-H)H(2H-1)(2p+1) a^2 n^(2H-3), summed over components."""
    n = _check_lag(n)
    p = int(p)
    if p < 0:
        raise ValueError("p must be a nonnegative integer")
    out = 0.0
    for a, h in zip(spec.coeffs, spec.hurst):
        out += (
            2.0 * (1.0 - h) * h * (2.0 * h - 1.0) * (2 * p + 1) * a * a
            * _p2h(float(n), 2.0 * h - 3.0)
        )
    return out


def mfbm_lag_cov_r(spec: ProcessSpec, n: int) -> float:
    """Stationary lag covariance R(0, n) of the mixed fractional comparator."""
    n = _check_lag(n)
    out = 0.0
    for a, h in zip(spec.coeffs, spec.hurst):
        two_h = 2.0 * h
        d_up = _p2h(n + 1.0, two_h) - _p2h(float(n), two_h)
        d_dn = _p2h(n - 1.0, two_h) - _p2h(float(n), two_h)
        out += (a * a / 2.0) * (d_up + d_dn)
    return out


def stationarity_gap(spec: ProcessSpec, x: float, n: int) -> float:
    """C(x, n) - R(0, n): how far lagged increment covariances sit from stationarity."""
    return lag_cov_c(spec, x, n) - mfbm_lag_cov_r(spec, n)


def markov_residual(spec: ProcessSpec, s: float, t: float, u: float) -> float:
    """Cov(s,u) Var(t) - Cov(s,t) Cov(t,u); vanishes identically iff Markov."""
    s, t, u = float(s), float(t), float(u)
    if not (0.0 < s < t < u):
        raise ValueError("markov residual requires 0 < s < t < u")
    return msfbm_cov(spec, s, u) * msfbm_var(spec, t) - msfbm_cov(
        spec, s, t
    ) * msfbm_cov(spec, t, u)


def conditional_variance(spec: ProcessSpec, t: float, s: float) -> float:
    """Var(S_t | S_s) = Var(t) - Cov(s,t)^2 / Var(s) for s, t > 0."""
    s, t = float(s), float(t)
    if s <= 0.0:
        raise ValueError("conditioning time s must be positive")
    if t <= 0.0:
        raise ValueError("time t must be positive")
    var_s = msfbm_var(spec, s)
    cov_st = msfbm_cov(spec, s, t)
    return msfbm_var(spec, t) - cov_st * cov_st / var_s


def rescale_coeffs(spec: ProcessSpec, h: float) -> ProcessSpec:
    """Spec with weights a_i * h^(H_i); time scaling t -> h t in kernel form."""
    h = float(h)
    if h <= 0.0:
        raise ValueError("scale factor h must be positive")
    coeffs = tuple(
        a * math.exp(hu * math.log(h)) for a, hu in zip(spec.coeffs, spec.hurst)
    )
    return ProcessSpec(coeffs, spec.hurst)
