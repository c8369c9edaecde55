"""Grid/path types, Gram factorization, and the two exact samplers."""

import numpy as np
import pytest

import msfbm
from msfbm import ProcessSpec, SamplePath, TimeGrid
from msfbm.sampler import FGN_CUTOFF, _fgn_draw, _fgn_spectra
from msfbm.seeds import derive_seed, replica_seeds, splitmix64

from conftest import rand_spec


class TestTimeGrid:
    def test_uniform(self):
        grid = TimeGrid.uniform(5, 2.0)
        assert grid.n_points == 5
        assert grid.horizon == 2.0
        assert grid.is_uniform()

    def test_must_start_at_zero(self):
        with pytest.raises(ValueError, match="start at t = 0"):
            TimeGrid([1.0, 2.0])

    def test_strictly_increasing(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            TimeGrid([0.0, 1.0, 1.0])

    def test_minimum_length(self):
        with pytest.raises(ValueError):
            TimeGrid([0.0])

    def test_non_uniform_detected(self):
        assert not TimeGrid([0.0, 0.1, 1.0]).is_uniform()


class TestSamplePath:
    def test_pinned_origin(self):
        grid = TimeGrid([0.0, 1.0])
        with pytest.raises(ValueError, match="start at value 0"):
            SamplePath(grid, [1.0, 2.0])

    def test_length_check(self):
        grid = TimeGrid([0.0, 1.0])
        with pytest.raises(ValueError):
            SamplePath(grid, [0.0, 1.0, 2.0])


class TestSeeds:
    def test_replica_seeds_distinct(self):
        seeds = replica_seeds(1234, 10_000)
        assert len(set(seeds)) == 10_000

    def test_derivation_deterministic(self):
        assert derive_seed(42, 3) == derive_seed(42, 3)
        assert derive_seed(42, 3) != derive_seed(42, 4)
        assert derive_seed(42, 3) != derive_seed(43, 3)

    def test_splitmix_reference_values(self):
        # finalizer of state 0 and 1 from the published splitmix64 stream
        assert splitmix64((0 + 0x9E3779B97F4A7C15) & (2**64 - 1)) == 0xE220A8397B1DCDAF
        assert splitmix64((1 + 0x9E3779B97F4A7C15) & (2**64 - 1)) == 0x910A2DEC89025CC1


class TestGramMatrix:
    def test_brownian_example(self):
        g = msfbm.gram_matrix(ProcessSpec([1.0], [0.5]), TimeGrid([0.0, 1.0, 2.0]))
        assert np.allclose(g, [[1.0, 1.0], [1.0, 2.0]], rtol=1e-12)

    def test_single_point_diagonal(self):
        g = msfbm.gram_matrix(ProcessSpec([1.0], [0.75]), TimeGrid([0.0, 1.0]))
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(2.0 - np.sqrt(2.0), rel=1e-12)

    def test_mixed_example_oracle(self):
        g = msfbm.gram_matrix(ProcessSpec([1.0, 1.0], [0.5, 0.75]), TimeGrid([0.0, 1.0, 2.0]))
        expected = [
            [1.585786437626905, 1.7303509133928742],
            [1.7303509133928742, 3.6568542494923802],
        ]
        assert np.allclose(g, expected, rtol=1e-12)

    def test_psd_over_random_specs(self, rng):
        for _ in range(20):
            spec = rand_spec(rng)
            n = int(rng.integers(2, 65))
            times = np.concatenate([[0.0], np.sort(rng.uniform(0.01, 10.0, n))])
            times = np.unique(times)
            g = msfbm.gram_matrix(spec, TimeGrid(times))
            eig_min = float(np.linalg.eigvalsh(g).min())
            assert eig_min >= -1e-10 * float(np.max(np.diag(g)))


class TestPsdFactor:
    def test_identity(self):
        fr = msfbm.psd_factor(np.eye(3))
        assert np.array_equal(fr.lower, np.eye(3))
        assert fr.jitter == 0.0

    def test_hand_checkable(self):
        fr = msfbm.psd_factor(np.array([[1.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(fr.lower, [[1.0, 0.0], [1.0, 1.0]])
        assert fr.jitter == 0.0

    def test_near_singular_dense_grid(self):
        grid = TimeGrid.uniform(1000, 1.0)
        g = msfbm.gram_matrix(ProcessSpec([1.0], [0.9]), grid)
        fr = msfbm.psd_factor(g)
        max_diag = float(np.max(np.diag(g)))
        assert fr.jitter <= 1e-10 * max_diag
        recon = fr.lower @ fr.lower.T
        target = g + fr.jitter * np.eye(g.shape[0])
        assert float(np.max(np.abs(recon - target))) <= 1e-10 * max_diag

    def test_indefinite_matrix_fails(self):
        with pytest.raises(msfbm.FactorizationFailure):
            msfbm.psd_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            msfbm.psd_factor(np.array([[1.0, 0.5], [0.2, 1.0]]))


class TestSampleExact:
    def test_determinism(self):
        spec = ProcessSpec([1.0], [0.6])
        grid = TimeGrid.uniform(16, 1.0)
        a = msfbm.sample_exact(spec, grid, 42)
        b = msfbm.sample_exact(spec, grid, 42)
        assert np.array_equal(a.values, b.values)
        c = msfbm.sample_exact(spec, grid, 43)
        assert not np.array_equal(a.values, c.values)

    def test_brownian_terminal_variance(self):
        spec = ProcessSpec([1.0], [0.5])
        grid = TimeGrid.uniform(16, 1.0)
        ens = msfbm.sample_ensemble(spec, grid, 10_000, 7)
        terminal = ens.values_matrix()[:, -1]
        est = float(np.mean(terminal ** 2))
        se = np.sqrt(2.0 / 10_000)  # Var(X^2) = 2 Var^2 for centered Gaussian
        assert abs(est - 1.0) <= 4 * se

    def test_cov_at_1_2_oracle(self):
        spec = ProcessSpec([1.0], [0.75])
        grid = TimeGrid.uniform(17, 2.0)
        times = grid.times
        j = int(np.argmin(np.abs(times - 1.0)))
        k = 16
        assert times[j] == 1.0 and times[k] == 2.0
        ens = msfbm.sample_ensemble(spec, grid, 10_000, 11)
        v = ens.values_matrix()
        est = float(np.mean(v[:, j] * v[:, k]))
        target = 0.73035091339287416
        var_j = msfbm.msfbm_var(spec, 1.0)
        var_k = msfbm.msfbm_var(spec, 2.0)
        se = np.sqrt((var_j * var_k + target ** 2) / 10_000)
        assert abs(est - target) <= 4 * se


class TestSampleViaFbm:
    def test_degenerate_grid_law(self):
        spec = ProcessSpec([1.0, 0.5], [0.3, 0.8])
        grid = TimeGrid([0.0, 0.7])
        vals = np.array(
            [msfbm.sample_via_fbm(spec, grid, derive_seed(5, k)).values[1] for k in range(10_000)]
        )
        var = msfbm.msfbm_var(spec, 0.7)
        est = float(np.mean(vals ** 2))
        se = var * np.sqrt(2.0 / 10_000)
        assert abs(est - var) <= 4 * se

    def test_brownian_cov_matches_min(self):
        spec = ProcessSpec([1.0], [0.5])
        grid = TimeGrid.uniform(9, 1.0)
        ens = msfbm.sample_ensemble(spec, grid, 10_000, 3, sampler="fbm")
        v = ens.values_matrix()[:, 1:]
        g = msfbm.gram_matrix(spec, grid)
        emp = (v.T @ v) / 10_000
        se = np.sqrt((np.outer(np.diag(g), np.diag(g)) + g * g) / 10_000)
        assert float(np.max(np.abs(emp - g) / se)) <= 5.0

    def test_differs_from_exact_pathwise(self):
        spec = ProcessSpec([1.0], [0.75])
        grid = TimeGrid.uniform(8, 1.0)
        a = msfbm.sample_exact(spec, grid, 99)
        b = msfbm.sample_via_fbm(spec, grid, 99)
        assert not np.allclose(a.values, b.values)

    def test_fgn_route_matches_gram(self):
        spec = ProcessSpec([1.0, 1.0], [0.4, 0.8])
        grid = TimeGrid.uniform(33, 2.0)
        ens = msfbm.sample_ensemble(spec, grid, 8000, 17, sampler="fgn")
        v = ens.values_matrix()[:, 1:]
        g = msfbm.gram_matrix(spec, grid)
        emp = (v.T @ v) / 8000
        se = np.sqrt((np.outer(np.diag(g), np.diag(g)) + g * g) / 8000)
        assert float(np.max(np.abs(emp - g) / se)) <= 5.0

    def test_fgn_exact_increment_covariance(self):
        # The circulant embedding reproduces the increment autocovariance
        # exactly: check E[x_a x_b] across many draws at small size.
        spec = ProcessSpec([1.0], [0.3])
        grid = TimeGrid.uniform(5, 1.0)
        spectra = _fgn_spectra(spec, grid)
        draws = np.array([_fgn_draw(spectra[0], derive_seed(2, k)) for k in range(40_000)])
        emp = draws.T @ draws / draws.shape[0]
        step = 0.25
        lags = np.arange(8, dtype=float)
        gamma = 0.5 * step ** 0.6 * (
            np.abs(lags + 1) ** 0.6 - 2 * lags ** 0.6 + np.abs(lags - 1) ** 0.6
        )
        for a in range(8):
            for b in range(8):
                want = gamma[abs(a - b)]
                assert abs(emp[a, b] - want) <= 5 * np.sqrt(2.0 / 40_000)

    def test_auto_cutoff_routing(self):
        spec = ProcessSpec([1.0], [0.5])
        small = TimeGrid.uniform(FGN_CUTOFF // 2, 1.0)
        big = TimeGrid.uniform(FGN_CUTOFF + 2, 1.0)
        assert np.array_equal(
            msfbm.sample_via_fbm(spec, small, 1).values,
            msfbm.sample_via_fbm(spec, small, 1, method="dense").values,
        )
        assert np.array_equal(
            msfbm.sample_via_fbm(spec, big, 1).values,
            msfbm.sample_via_fbm(spec, big, 1, method="fgn").values,
        )


class TestSampleEnsemble:
    def test_single_replica_matches_sample_exact(self):
        spec = ProcessSpec([1.0, 1.0], [0.5, 0.75])
        grid = TimeGrid.uniform(10, 1.0)
        ens = msfbm.sample_ensemble(spec, grid, 1, 2024)
        direct = msfbm.sample_exact(spec, grid, ens.replica_seeds[0])
        assert np.array_equal(ens.paths[0].values, direct.values)

    def test_reproducible_and_thread_invariant(self):
        spec = ProcessSpec([1.0], [0.3])
        grid = TimeGrid.uniform(12, 1.0)
        a = msfbm.sample_ensemble(spec, grid, 64, 5, n_threads=1)
        b = msfbm.sample_ensemble(spec, grid, 64, 5, n_threads=4)
        for pa, pb in zip(a.paths, b.paths):
            assert np.array_equal(pa.values, pb.values)

    def test_centered_mean(self):
        spec = ProcessSpec([1.0], [0.3])
        grid = TimeGrid.uniform(8, 1.0)
        ens = msfbm.sample_ensemble(spec, grid, 10_000, 13)
        v = ens.values_matrix()
        for idx in range(1, grid.n_points):
            sd = np.sqrt(msfbm.msfbm_var(spec, grid.times[idx]) / 10_000)
            assert abs(float(np.mean(v[:, idx]))) <= 4 * sd

    def test_rejects_zero_reps(self):
        with pytest.raises(ValueError):
            msfbm.sample_ensemble(ProcessSpec([1.0], [0.5]), TimeGrid.uniform(4, 1.0), 0, 1)

    def test_values_start_at_zero(self):
        ens = msfbm.sample_ensemble(
            ProcessSpec([1.0], [0.8]), TimeGrid.uniform(6, 1.0), 50, 9, sampler="fbm"
        )
        assert all(p.values[0] == 0.0 for p in ens.paths)
