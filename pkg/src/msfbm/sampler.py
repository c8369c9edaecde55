"""Exact Gaussian samplers for mixed sub-fractional paths on finite grids.

Two independent constructions with identical finite-dimensional laws:

* ``sample_exact`` factorizes the process Gram matrix on the grid and maps
  an i.i.d. normal vector through the factor.
* ``sample_via_fbm`` builds each component from a fractional Brownian
  motion on the symmetric grid {-t_k, ..., t_k}, folds it into a
  sub-fractional component via (B(t) + B(-t))/sqrt(2), and sums the
  weighted components.  On uniform grids the per-component fBm may be
  drawn through circulant embedding of its increment process
  (Davies-Harte), which is still exact and scales to 2^16-point paths.

All paths are pure functions of (spec, grid, seed): replicas can be
generated concurrently in any order without changing a single bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .kernels import _p2h_array
from .process import ProcessSpec
from .seeds import derive_seed, normal_stream, replica_seeds

__all__ = [
    "TimeGrid",
    "SamplePath",
    "Ensemble",
    "FactorResult",
    "FactorizationFailure",
    "gram_matrix",
    "psd_factor",
    "sample_exact",
    "sample_via_fbm",
    "sample_ensemble",
    "JITTER_LADDER",
    "DENSE_LIMIT",
    "FGN_CUTOFF",
]

# Relative jitter escalation for barely-indefinite Gram matrices.
JITTER_LADDER = (0.0, 1e-14, 1e-12, 1e-10)

# Largest grid handled by dense factorization; longer uniform grids go
# through the circulant fBm route.
DENSE_LIMIT = 2 ** 14

# Uniform-grid size from which sample_via_fbm("auto") prefers circulant
# embedding over the dense symmetric Gram.
FGN_CUTOFF = 2 ** 8


class FactorizationFailure(RuntimeError):
    """Gram factorization failed at every jitter level."""


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing times starting at 0."""

    times: np.ndarray

    def __init__(self, times: Sequence[float]):
        arr = np.asarray(times, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("grid needs at least two time points")
        if arr[0] != 0.0:
            raise ValueError("grid must start at t = 0")
        if not np.all(np.diff(arr) > 0.0):
            raise ValueError("grid times must be strictly increasing")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid times must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "times", arr)

    @classmethod
    def uniform(cls, n_points: int, horizon: float) -> "TimeGrid":
        if n_points < 2:
            raise ValueError("grid needs at least two time points")
        if horizon <= 0.0:
            raise ValueError("horizon must be positive")
        return cls(np.linspace(0.0, float(horizon), int(n_points)))

    @property
    def n_points(self) -> int:
        return int(self.times.size)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        steps = np.diff(self.times)
        return bool(np.all(np.abs(steps - steps[0]) <= rtol * steps[0]))


@dataclass(frozen=True)
class SamplePath:
    """One realization on a grid; the value at t = 0 is pinned to zero."""

    grid: TimeGrid
    values: np.ndarray

    def __init__(self, grid: TimeGrid, values: Sequence[float]):
        arr = np.asarray(values, dtype=float)
        if arr.shape != grid.times.shape:
            raise ValueError("values and grid lengths differ")
        if arr[0] != 0.0:
            raise ValueError("path must start at value 0")
        if not np.all(np.isfinite(arr)):
            raise ValueError("path values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class Ensemble:
    """Independent replicas sharing a grid, with reproducible per-replica seeds."""

    spec: ProcessSpec
    grid: TimeGrid
    paths: tuple[SamplePath, ...]
    master_seed: int
    replica_seeds: tuple[int, ...]
    sampler: str = "exact"
    jitter: float = 0.0

    @property
    def n_reps(self) -> int:
        return len(self.paths)

    def values_matrix(self) -> np.ndarray:
        """(n_reps, n_points) matrix of path values."""
        return np.vstack([p.values for p in self.paths])


@dataclass(frozen=True)
class FactorResult:
    """Lower-triangular factor with the jitter that made it succeed."""

    lower: np.ndarray
    jitter: float


def gram_matrix(spec: ProcessSpec, grid: TimeGrid) -> np.ndarray:
    """Process covariance at the positive grid times (t = 0 row excluded)."""
    t = grid.times[1:]
    ts = t[:, None] + t[None, :]
    td = np.abs(t[:, None] - t[None, :])
    g = np.zeros((t.size, t.size))
    for a, h in zip(spec.coeffs, spec.hurst):
        two_h = 2.0 * h
        pt = _p2h_array(t, two_h)
        g += (a * a) * (pt[:, None] + pt[None, :]
                        - 0.5 * (_p2h_array(ts, two_h) + _p2h_array(td, two_h)))
    return 0.5 * (g + g.T)


def psd_factor(g: np.ndarray, jitter_ladder: Sequence[float] = JITTER_LADDER) -> FactorResult:
    """Cholesky factor of g + eps*I, escalating eps until factorization succeeds."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError("gram matrix must be square")
    if not np.allclose(g, g.T, rtol=0.0, atol=0.0):
        raise ValueError("gram matrix must be symmetric")
    max_diag = float(np.max(np.diag(g))) if g.size else 0.0
    for level in jitter_ladder:
        eps = level * max_diag
        target = g + eps * np.eye(g.shape[0]) if eps else g
        try:
            lower = np.linalg.cholesky(target)
        except np.linalg.LinAlgError:
            continue
        return FactorResult(lower=lower, jitter=eps)
    raise FactorizationFailure(
        f"cholesky failed at all jitter levels {tuple(jitter_ladder)}"
    )


def _finish_path(grid: TimeGrid, body: np.ndarray) -> SamplePath:
    values = np.empty(grid.n_points)
    values[0] = 0.0
    values[1:] = body
    return SamplePath(grid, values)


def sample_exact(spec: ProcessSpec, grid: TimeGrid, seed: int) -> SamplePath:
    """Exact draw through the factored Gram matrix; bit-stable in (spec, grid, seed)."""
    factor = psd_factor(gram_matrix(spec, grid))
    return _exact_path(grid, factor.lower, seed)


def _exact_path(grid: TimeGrid, lower: np.ndarray, seed: int) -> SamplePath:
    z = normal_stream(seed, lower.shape[0])
    return _finish_path(grid, lower @ z)


def _symmetric_fbm_factors(spec: ProcessSpec, grid: TimeGrid) -> list[FactorResult]:
    """Per-component factors of the fBm Gram on {-t_k ... -t_1, t_1 ... t_k}."""
    pos = grid.times[1:]
    sym = np.concatenate([-pos[::-1], pos])
    abs_sym = np.abs(sym)
    abs_diff = np.abs(sym[:, None] - sym[None, :])
    factors = []
    for h in spec.hurst:
        two_h = 2.0 * h
        pt = _p2h_array(abs_sym, two_h)
        k = 0.5 * (pt[:, None] + pt[None, :] - _p2h_array(abs_diff, two_h))
        factors.append(psd_factor(0.5 * (k + k.T)))
    return factors


def _fbm_dense_path(
    spec: ProcessSpec, grid: TimeGrid, factors: Sequence[FactorResult], seed: int
) -> SamplePath:
    m = grid.n_points - 1
    body = np.zeros(m)
    for i, (a, factor) in enumerate(zip(spec.coeffs, factors)):
        if a == 0.0:
            continue
        z = normal_stream(derive_seed(seed, i), 2 * m)
        b = factor.lower @ z
        neg = b[:m][::-1]
        pos = b[m:]
        body += a * (pos + neg) / math.sqrt(2.0)
    return _finish_path(grid, body)


def _fgn_spectra(spec: ProcessSpec, grid: TimeGrid) -> list[np.ndarray]:
    """Circulant-embedding eigenvalue square roots for each component's
    increment process over the symmetric uniform grid."""
    if not grid.is_uniform():
        raise ValueError("circulant embedding requires a uniform grid")
    m = grid.n_points - 1
    step = grid.horizon / m
    length = 2 * m  # increments covering [-T, T]
    lags = np.arange(length + 1, dtype=float)
    spectra = []
    for h in spec.hurst:
        two_h = 2.0 * h
        gamma = 0.5 * _p2h_array(np.full(1, step), two_h)[0] * (
            _p2h_array(lags + 1.0, two_h)
            - 2.0 * _p2h_array(lags, two_h)
            + _p2h_array(np.abs(lags - 1.0), two_h)
        )
        row = np.concatenate([gamma, gamma[-2:0:-1]])
        eig = np.fft.fft(row).real
        floor = -1e-8 * float(eig.max())
        if eig.min() < floor:
            raise FactorizationFailure(
                f"circulant embedding is indefinite (min eigenvalue {eig.min():.3e})"
            )
        spectra.append(np.sqrt(np.clip(eig, 0.0, None)))
    return spectra


def _fgn_draw(sqrt_eig: np.ndarray, seed: int) -> np.ndarray:
    """One exact fGn vector of length len(sqrt_eig)//2 from the embedding."""
    size = sqrt_eig.size
    half = size // 2
    v = normal_stream(seed, size)
    z = np.empty(size, dtype=complex)
    z[0] = sqrt_eig[0] * v[0]
    z[half] = sqrt_eig[half] * v[1]
    ks = np.arange(1, half)
    zk = (sqrt_eig[ks] / math.sqrt(2.0)) * (v[2 * ks] + 1j * v[2 * ks + 1])
    z[ks] = zk
    z[size - ks] = np.conj(zk)
    return (np.fft.fft(z) / math.sqrt(size)).real[: size // 2]


def _fbm_fgn_path(
    spec: ProcessSpec, grid: TimeGrid, spectra: Sequence[np.ndarray], seed: int
) -> SamplePath:
    m = grid.n_points - 1
    body = np.zeros(m)
    for i, (a, sqrt_eig) in enumerate(zip(spec.coeffs, spectra)):
        if a == 0.0:
            continue
        fgn = _fgn_draw(sqrt_eig, derive_seed(seed, i))
        cum = np.concatenate([[0.0], np.cumsum(fgn)])
        origin = cum[m]
        pos = cum[m + 1:] - origin
        neg = cum[m - 1::-1] - origin
        body += a * (pos + neg) / math.sqrt(2.0)
    return _finish_path(grid, body)


def _resolve_fbm_method(grid: TimeGrid, method: str) -> str:
    if method == "auto":
        return "fgn" if grid.is_uniform() and grid.n_points - 1 >= FGN_CUTOFF else "dense"
    if method not in ("dense", "fgn"):
        raise ValueError(f"unknown fbm construction method {method!r}")
    return method


def sample_via_fbm(
    spec: ProcessSpec, grid: TimeGrid, seed: int, method: str = "auto"
) -> SamplePath:
    """Draw a path by folding per-component fBms on the symmetric grid.

    Distributionally identical to ``sample_exact`` but built from a
    different construction (and a different use of the seed stream), so
    paths differ realization by realization.
    """
    method = _resolve_fbm_method(grid, method)
    if method == "dense":
        factors = _symmetric_fbm_factors(spec, grid)
        return _fbm_dense_path(spec, grid, factors, seed)
    spectra = _fgn_spectra(spec, grid)
    return _fbm_fgn_path(spec, grid, spectra, seed)


def _replica_runner(
    make_path: Callable[[int], SamplePath], seeds: Sequence[int], n_threads: int
) -> list[SamplePath]:
    if n_threads <= 1:
        return [make_path(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(make_path, seeds))


def sample_ensemble(
    spec: ProcessSpec,
    grid: TimeGrid,
    n_reps: int,
    master_seed: int,
    sampler: str = "auto",
    n_threads: int = 1,
) -> Ensemble:
    """Generate ``n_reps`` independent replicas with derived per-replica seeds.

    ``sampler`` is one of "exact", "fbm", "fgn" or "auto"; "auto" picks the
    dense Gram route up to DENSE_LIMIT points and circulant embedding
    beyond.  The result is a pure function of (spec, grid, n_reps,
    master_seed, sampler) regardless of ``n_threads``.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    if sampler == "auto":
        sampler = "exact" if grid.n_points <= DENSE_LIMIT else "fgn"
    seeds = replica_seeds(master_seed, n_reps)
    jitter = 0.0
    if sampler == "exact":
        factor = psd_factor(gram_matrix(spec, grid))
        jitter = factor.jitter
        make = lambda s: _exact_path(grid, factor.lower, s)
    elif sampler == "fbm":
        factors = _symmetric_fbm_factors(spec, grid)
        jitter = max(f.jitter for f in factors)
        make = lambda s: _fbm_dense_path(spec, grid, factors, s)
    elif sampler == "fgn":
        spectra = _fgn_spectra(spec, grid)
        make = lambda s: _fbm_fgn_path(spec, grid, spectra, s)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    paths = _replica_runner(make, seeds, n_threads)
    return Ensemble(
        spec=spec,
        grid=grid,
        paths=tuple(paths),
        master_seed=int(master_seed),
        replica_seeds=seeds,
        sampler=sampler,
        jitter=jitter,
    )
