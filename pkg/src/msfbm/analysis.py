"""Statistical estimators confronting simulated paths with theory.

Covers variation statistics over dyadic refinements, variogram-based
regularity estimation, a difference-quotient divergence probe, lag-sum
short-range-dependence checks, and box-counting dimension estimates for
the graph, range and level sets of a path.

All regressions are ordinary least squares on log-log points; every
estimate carries the regression stderr and the scale window it was fit
on.  Box counting stands in for Hausdorff dimension: the two coincide for
the graphs and level sets probed here, but only box counts are computable
from finite data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.stats import linregress

from .kernels import lag_cov_series, msfbm_cov, msfbm_var
from .process import ProcessSpec
from .sampler import Ensemble, SamplePath, TimeGrid, sample_ensemble
from .seeds import derive_seed

__all__ = [
    "GridMismatch",
    "InsufficientReplicas",
    "InsufficientResolution",
    "LevelNotCrossed",
    "BoxCountMethod",
    "VariationReport",
    "DimensionEstimate",
    "empirical_cov",
    "p_variation_stat",
    "qv_scaling_exponent",
    "holder_exponent_estimate",
    "graph_box_dimension",
    "level_set_box_dimension",
    "range_dimension",
    "nondiff_probe",
    "srd_partial_sums",
]


class GridMismatch(ValueError):
    """The requested uniform partition is not contained in the path's grid."""


class InsufficientReplicas(ValueError):
    """The ensemble has too few replicas for the estimator."""


class InsufficientResolution(ValueError):
    """The grid is too coarse for the requested scale window."""


class LevelNotCrossed(ValueError):
    """The path never crosses the requested level on the probed interval."""


class BoxCountMethod(str, Enum):
    GRAPH_BOX_COUNT = "GraphBoxCount"
    LEVEL_SET_BOX_COUNT = "LevelSetBoxCount"
    RANGE_BOX_COUNT = "RangeBoxCount"


@dataclass(frozen=True)
class VariationReport:
    """Mean order-p variation statistics across dyadic refinements."""

    p: float
    partition_sizes: tuple[int, ...]
    statistics: tuple[float, ...]
    fitted_log_slope: float
    slope_stderr: float

    def __post_init__(self):
        sizes = self.partition_sizes
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("partition sizes must be strictly increasing")
        if any(s < 0.0 for s in self.statistics):
            raise ValueError("variation statistics must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "partition_sizes": list(self.partition_sizes),
            "statistics": list(self.statistics),
            "fitted_log_slope": self.fitted_log_slope,
            "slope_stderr": self.slope_stderr,
        }

    def to_csv(self) -> str:
        """Plot-ready table: scale, statistic, and the fitted power law."""
        logn = np.log(np.array(self.partition_sizes, dtype=float))
        intercept = float(np.mean(np.log(self.statistics) - self.fitted_log_slope * logn))
        lines = ["scale,statistic,fit"]
        for n, stat in zip(self.partition_sizes, self.statistics):
            fit = math.exp(intercept + self.fitted_log_slope * math.log(n))
            lines.append(f"{n},{stat!r},{fit!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DimensionEstimate:
    """Box-counting dimension with its regression stderr and scale window."""

    value: float
    stderr: float
    scale_range: tuple[int, int]
    method: BoxCountMethod

    def __post_init__(self):
        if not (0.0 <= self.value <= 2.0):
            raise ValueError("dimension estimate must lie in [0, 2]")
        lo, hi = self.scale_range
        if lo < 1 or hi < lo:
            raise ValueError("scale_range must satisfy 1 <= min_boxes <= max_boxes")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "scale_range": list(self.scale_range),
            "method": self.method.value,
        }

    def to_csv(self) -> str:
        return (
            "method,value,stderr,min_boxes,max_boxes\n"
            f"{self.method.value},{self.value!r},{self.stderr!r},"
            f"{self.scale_range[0]},{self.scale_range[1]}\n"
        )


def _loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """OLS slope and stderr of log(y) against log(x)."""
    if len(x) < 2:
        raise InsufficientResolution("need at least two scales to fit a slope")
    fit = linregress(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)))
    stderr = 0.0 if math.isnan(fit.stderr) else float(fit.stderr)
    return float(fit.slope), stderr


def empirical_cov(ens: Ensemble, j: int, k: int) -> tuple[float, float, float]:
    """Unbiased cross-replica covariance at grid indices (j, k).

    Returns (estimate, stderr, zscore) where the stderr is the Gaussian
    fourth-moment value sqrt((G_jj G_kk + G_jk^2)/R) at the theory target
    and the z-score compares the estimate against the exact kernel; a zero
    stderr (pinned t = 0 column) reports a zero z-score by convention.
    """
    if ens.n_reps < 2:
        raise InsufficientReplicas("empirical covariance needs at least 2 replicas")
    times = ens.grid.times
    if not (0 <= j < times.size and 0 <= k < times.size):
        raise ValueError("grid index out of range")
    v = ens.values_matrix()
    x = v[:, j]
    y = v[:, k]
    xc = x - x.mean()
    yc = y - y.mean()
    est = float(xc @ yc) / (ens.n_reps - 1)
    theory = msfbm_cov(ens.spec, times[j], times[k])
    var_j = msfbm_var(ens.spec, times[j])
    var_k = msfbm_var(ens.spec, times[k])
    stderr = math.sqrt((var_j * var_k + theory * theory) / ens.n_reps)
    z = 0.0 if stderr == 0.0 else (est - theory) / stderr
    return est, stderr, z


def p_variation_stat(path: SamplePath, p: float, n_sub: int) -> float:
    """Order-p variation sum over the uniform n_sub-interval partition of [0, T]."""
    p = float(p)
    if p <= 0.0:
        raise ValueError("variation order p must be positive")
    n_sub = int(n_sub)
    if n_sub < 1:
        raise ValueError("n_sub must be >= 1")
    times = path.grid.times
    n_steps = times.size - 1
    if n_steps % n_sub != 0:
        raise GridMismatch(
            f"grid with {n_steps} steps does not contain a uniform {n_sub}-interval partition"
        )
    stride = n_steps // n_sub
    horizon = path.grid.horizon
    sel_times = times[::stride]
    targets = np.linspace(0.0, horizon, n_sub + 1)
    if not np.allclose(sel_times, targets, rtol=0.0, atol=1e-9 * max(horizon, 1.0)):
        raise GridMismatch("grid points at the partition stride are not uniform")
    increments = np.diff(path.values[::stride])
    return float(np.sum(np.abs(increments) ** p))


def qv_scaling_exponent(
    spec: ProcessSpec,
    levels: Sequence[int],
    n_reps: int,
    master_seed: int,
    p: float = 2.0,
    sampler: str = "fgn",
    n_threads: int = 1,
) -> VariationReport:
    """Mean order-p variation across dyadic grids 2^m on [0, 1], with slope fit.

    The fitted log-log slope of the mean statistic against the partition
    size discriminates the variation regimes: positive slope 1 - 2*h_min
    for a rough component, level sum(a_i^2) at slope 0 in the all-Brownian
    case, negative slope when every component is smoother than Brownian.
    """
    levels = [int(m) for m in levels]
    if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be at least two ascending dyadic exponents")
    sizes = []
    stats = []
    for li, m in enumerate(levels):
        n = 2 ** m
        grid = TimeGrid.uniform(n + 1, 1.0)
        ens = sample_ensemble(
            spec, grid, n_reps, derive_seed(master_seed, li), sampler=sampler,
            n_threads=n_threads,
        )
        values = [p_variation_stat(path, p, n) for path in ens.paths]
        sizes.append(n)
        stats.append(float(np.mean(values)))
    slope, stderr = _loglog_fit(np.array(sizes, dtype=float), np.array(stats))
    return VariationReport(
        p=p,
        partition_sizes=tuple(sizes),
        statistics=tuple(stats),
        fitted_log_slope=slope,
        slope_stderr=stderr,
    )


def holder_exponent_estimate(ens: Ensemble, n_lags: int = 10) -> tuple[float, float]:
    """Variogram regression estimate of the path regularity exponent.

    Fits log E|S(t+d) - S(t)|^2 against log d over the smallest decade of
    lags (multiples 1..n_lags of the grid step) and returns half the slope
    with its stderr.  Small scales are governed by the roughest active
    component, so the estimate targets h_min.
    """
    if not ens.grid.is_uniform():
        raise InsufficientResolution("variogram regression requires a uniform grid")
    n_points = ens.grid.n_points
    if n_points < 2 ** 8:
        raise InsufficientResolution("variogram regression requires at least 2^8 points")
    if ens.n_reps < 10 ** 2:
        raise InsufficientReplicas("variogram regression requires at least 100 replicas")
    lags = range(1, min(int(n_lags), n_points - 1) + 1)
    if len(lags) < 4:
        raise InsufficientResolution("fewer than 4 lag scales available")
    step = ens.grid.horizon / (n_points - 1)
    v = ens.values_matrix()
    xs = []
    ys = []
    for k in lags:
        diff = v[:, k:] - v[:, :-k]
        xs.append(k * step)
        ys.append(float(np.mean(diff * diff)))
    slope, stderr = _loglog_fit(np.array(xs), np.array(ys))
    return slope / 2.0, stderr / 2.0


def _box_levels(k_min: int, k_max: int) -> range:
    if k_max - k_min < 4:
        raise InsufficientResolution("box sizes must span at least 4 octaves")
    return range(k_min, k_max + 1)


def graph_box_dimension(
    path: SamplePath, k_min: int = 3, k_max: int | None = None
) -> DimensionEstimate:
    """Box-counting dimension of the rescaled graph {(t, S_t)}.

    Counts boxes of side 2^-k hit by the linearly interpolated graph (per
    time column, the vertical span of the samples plus the interpolated
    values at the column boundaries), then fits log N against log 2^k.
    """
    n_steps = path.grid.n_points - 1
    if n_steps + 1 < 2 ** 14:
        raise InsufficientResolution("graph box counting requires at least 2^14 points")
    if k_max is None:
        k_max = int(math.log2(n_steps)) - 5
    levels = _box_levels(k_min, k_max)

    t_norm = path.grid.times / path.grid.horizon
    v = path.values
    vmin, vmax = float(v.min()), float(v.max())
    y = np.zeros_like(v) if vmax == vmin else (v - vmin) / (vmax - vmin)

    counts = []
    for k in levels:
        m = 2 ** k
        cols = np.minimum((t_norm * m).astype(np.int64), m - 1)
        fy = np.minimum(np.floor(y * m), m - 1)
        lo = np.full(m, np.inf)
        hi = np.full(m, -np.inf)
        np.minimum.at(lo, cols, fy)
        np.maximum.at(hi, cols, fy)
        borders = np.arange(1, m) / m
        fw = np.minimum(np.floor(np.interp(borders, t_norm, y) * m), m - 1)
        np.minimum.at(lo, np.arange(m - 1), fw)
        np.maximum.at(hi, np.arange(m - 1), fw)
        np.minimum.at(lo, np.arange(1, m), fw)
        np.maximum.at(hi, np.arange(1, m), fw)
        occupied = np.isfinite(lo)
        counts.append(float(np.sum(hi[occupied] - lo[occupied] + 1.0)))
    slope, stderr = _loglog_fit(np.array([2.0 ** k for k in levels]), np.array(counts))
    return DimensionEstimate(
        value=float(np.clip(slope, 0.0, 2.0)),
        stderr=stderr,
        scale_range=(2 ** levels[0], 2 ** levels[-1]),
        method=BoxCountMethod.GRAPH_BOX_COUNT,
    )


def level_set_box_dimension(
    path: SamplePath,
    x: float,
    eps: float,
    k_min: int = 2,
    k_max: int | None = None,
) -> DimensionEstimate:
    """Box-counting dimension of the level-x crossing set on [eps, T].

    Counts, at every dyadic subdivision of [eps, T], the intervals that
    contain a sign change of S - x.  The matching theorem is a
    positive-probability statement, so single-path estimates are expected
    to scatter; aggregate with a median across replicas.
    """
    eps = float(eps)
    horizon = path.grid.horizon
    if not (0.0 < eps < horizon):
        raise ValueError("eps must lie strictly inside (0, T)")
    mask = path.grid.times >= eps
    times = path.grid.times[mask]
    d = path.values[mask] - float(x)
    if times.size < 2:
        raise InsufficientResolution("no grid points beyond eps")
    if k_max is None:
        k_max = int(math.log2(times.size)) - 4
    levels = _box_levels(k_min, k_max)

    inner = (d[:-1] == 0.0) | (d[:-1] * d[1:] < 0.0)
    cross_times = np.where(d[:-1] == 0.0, times[:-1], 0.5 * (times[:-1] + times[1:]))[inner]
    if d[-1] == 0.0:
        cross_times = np.append(cross_times, times[-1])
    if cross_times.size == 0:
        raise LevelNotCrossed(f"path never crosses level {x} on [{eps}, {horizon}]")

    span = horizon - eps
    rel = (cross_times - eps) / span
    counts = []
    for k in levels:
        m = 2 ** k
        boxes = np.minimum((rel * m).astype(np.int64), m - 1)
        counts.append(float(np.unique(boxes).size))
    slope, stderr = _loglog_fit(np.array([2.0 ** k for k in levels]), np.array(counts))
    return DimensionEstimate(
        value=float(np.clip(slope, 0.0, 2.0)),
        stderr=stderr,
        scale_range=(2 ** levels[0], 2 ** levels[-1]),
        method=BoxCountMethod.LEVEL_SET_BOX_COUNT,
    )


def range_dimension(
    path: SamplePath, k_min: int = 1, k_max: int | None = None
) -> DimensionEstimate:
    """Box-counting dimension of the set of attained values."""
    v = path.values
    if k_max is None:
        k_max = max(int(math.log2(v.size)) - 4, k_min + 4)
    levels = _box_levels(k_min, k_max)
    vmin, vmax = float(v.min()), float(v.max())
    counts = []
    if vmax == vmin:
        counts = [1.0 for _ in levels]
    else:
        y = (v - vmin) / (vmax - vmin)
        for k in levels:
            m = 2 ** k
            boxes = np.minimum((y * m).astype(np.int64), m - 1)
            counts.append(float(np.unique(boxes).size))
    slope, stderr = _loglog_fit(np.array([2.0 ** k for k in levels]), np.array(counts))
    return DimensionEstimate(
        value=float(np.clip(slope, 0.0, 2.0)),
        stderr=stderr,
        scale_range=(2 ** levels[0], 2 ** levels[-1]),
        method=BoxCountMethod.RANGE_BOX_COUNT,
    )


def nondiff_probe(ens: Ensemble, t0: float) -> list[tuple[float, float]]:
    """Mean difference-quotient magnitude at dyadic offsets around t0.

    For each window half-width eps = step * 2^j the probe evaluates
    max(|S(t0 - eps) - S(t0)|, |S(t0 + eps) - S(t0)|) / eps, i.e. the
    quotient at the window boundary, and averages it over replicas.  For a
    non-differentiable path the quotient grows as eps shrinks, with
    log-log slope near h_min - 1; rows are returned with eps ascending.
    """
    if not ens.grid.is_uniform():
        raise InsufficientResolution("the probe requires a uniform grid")
    times = ens.grid.times
    n_points = times.size
    step = ens.grid.horizon / (n_points - 1)
    i0 = int(round(float(t0) / step))
    if not (0 < i0 < n_points - 1) or abs(times[i0] - t0) > 1e-9 * max(ens.grid.horizon, 1.0):
        raise ValueError("t0 must be an interior grid point")
    reach = min(i0, n_points - 1 - i0)
    n_windows = int(math.floor(math.log2(reach))) + 1 if reach >= 1 else 0
    if n_windows < 4:
        raise InsufficientResolution("fewer than 4 nested windows available around t0")
    v = ens.values_matrix()
    center = v[:, i0]
    rows = []
    for j in range(n_windows):
        offset = 2 ** j
        eps = offset * step
        quot = np.maximum(
            np.abs(v[:, i0 + offset] - center), np.abs(v[:, i0 - offset] - center)
        ) / eps
        rows.append((float(eps), float(np.mean(quot))))
    return rows


def srd_partial_sums(spec: ProcessSpec, p: int, n_max: int) -> np.ndarray:
    """Partial sums of the lag covariances C(p, n) for n = 1..n_max.

    Summation order is fixed (ascending n), so results are bit-stable.
    The terms decay like n^(2*h_max - 3); the sums converge for every
    admissible spec, at a pace set by h_max.
    """
    n_max = int(n_max)
    if n_max < 10:
        raise ValueError("n_max must be at least 10")
    terms = lag_cov_series(spec, p, np.arange(1, n_max + 1))
    return np.cumsum(terms)
