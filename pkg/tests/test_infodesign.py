import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optsample.estimator import SamplingSchedule, build_regression, psi_gram
from optsample.exceptions import NotConverged
from optsample.infodesign import (
    DesignMeasure,
    InformationMatrix,
    _cholupdate,
    doptimal_density,
    expected_info,
    greedy_schedule,
    greedy_selection,
    kw_statistic,
    logdet_gain,
    sample_schedule,
    uniform_measure,
    uniform_schedule,
)
from optsample.signals import FrequencyBasis, regressor_psi


def random_pd(rng, C, scale=1.0):
    X = rng.normal(size=(C, C + 2)) + 1j * rng.normal(size=(C, C + 2))
    return scale * (X @ X.conj().T) / C + np.eye(C)


def direct_logdet(R):
    sign, val = np.linalg.slogdet(R)
    assert sign.real > 0
    return val


class TestMeasures:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            DesignMeasure([0.0, 1.0], [0.5, 0.6])

    def test_grid_must_increase(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            DesignMeasure([0.0, 0.0], [0.5, 0.5])

    def test_negative_weights(self):
        with pytest.raises(ValueError):
            DesignMeasure([0.0, 1.0], [1.5, -0.5])

    def test_uniform_measure_cells_tile_window(self):
        m = uniform_measure(5.0, 50)
        edges = m.cell_edges()
        assert edges[0] == 0.0 and edges[-1] == pytest.approx(5.0)
        np.testing.assert_allclose(np.diff(edges), 0.1)

    def test_empirical_measure_merges_duplicates(self):
        m = DesignMeasure.from_schedule(SamplingSchedule([0.0, 1.0, 1.0, 2.0], 2.0))
        np.testing.assert_array_equal(m.grid, [0, 1, 2])
        np.testing.assert_allclose(m.weights, [0.25, 0.5, 0.25])


class TestExpectedInfo:
    def test_point_mass_at_origin_is_rank_one(self, sec5_basis):
        R = expected_info(DesignMeasure([0.0], [1.0]), sec5_basis, 12).entries
        np.testing.assert_allclose(R, 12 * np.ones((9, 9)))
        assert np.linalg.matrix_rank(R) == 1

    @given(w=st.lists(st.floats(0.0, 1.0), min_size=3, max_size=30), N=st.integers(1, 500))
    @settings(max_examples=50)
    def test_diagonal_equals_N(self, w, N):
        w = np.asarray(w) + 1e-3
        m = DesignMeasure(np.linspace(0, 5, w.size), w / w.sum())
        R = expected_info(m, FrequencyBasis.from_omegas([1.0, 4.2, 12.3]), N).entries
        np.testing.assert_array_equal(np.diagonal(R).real, N)

    def test_uniform_quadrature_oracle(self, sec5_basis):
        T, N = 5.0, 100
        R = expected_info(uniform_measure(T, 10_000), sec5_basis, N).entries
        b = sec5_basis.betas
        for p in range(9):
            for q in range(9):
                d = b[q] - b[p]
                exact = N if d == 0 else N * (np.exp(1j * d * T) - 1) / (1j * d * T)
                # pairs with d*T a multiple of 2*pi integrate to zero; measure those against N
                assert abs(R[p, q] - exact) <= 1e-3 * max(abs(exact), 1e-9 * N)

    def test_empirical_measure_reproduces_gram(self, sec5_input, rng):
        sched = SamplingSchedule(np.sort(rng.uniform(0, 5, 40)), 5.0)
        R = expected_info(DesignMeasure.from_schedule(sched), sec5_input.basis, 40).entries
        np.testing.assert_allclose(R, psi_gram(build_regression(sec5_input, sched)).entries, atol=1e-12)

    def test_information_matrix_checks(self):
        with pytest.raises(ValueError, match="Hermitian"):
            InformationMatrix(np.array([[1.0, 1.0], [0.0, 1.0]]), 1)
        with pytest.raises(ValueError, match="PSD"):
            InformationMatrix(np.diag([1.0, -1.0]), 1)


class TestLogdetGain:
    def test_identity_and_ones(self):
        C = 7
        assert logdet_gain(np.eye(C), np.ones(C)) == pytest.approx(np.log(1 + C))

    def test_matches_determinant_lemma(self, rng):
        for _ in range(50):
            C = int(rng.integers(1, 12))
            R = random_pd(rng, C)
            psi = np.exp(1j * rng.uniform(0, 2 * np.pi, C))
            expected = direct_logdet(R + np.outer(psi, psi.conj())) - direct_logdet(R)
            assert logdet_gain(R, psi) == pytest.approx(expected, rel=1e-8)
            assert logdet_gain(R, psi) > 0

    def test_rejects_non_pd(self):
        with pytest.raises(ValueError, match="positive definite"):
            logdet_gain(np.diag([1.0, -1.0]), np.ones(2))

    def test_cholupdate(self, rng):
        import scipy.linalg as la

        for C in (1, 3, 9):
            R = random_pd(rng, C)
            x = rng.normal(size=C) + 1j * rng.normal(size=C)
            Lc = la.cholesky(R, lower=True)
            _cholupdate(Lc, x)
            np.testing.assert_allclose(Lc @ Lc.conj().T, R + np.outer(x, x.conj()), atol=1e-12)


class TestGreedy:
    def test_full_grid_when_N_equals_L(self, sec5_basis):
        s = greedy_schedule(sec5_basis, 5.0, 30, 30)
        np.testing.assert_allclose(s.times, np.linspace(0, 5, 30))

    def test_first_pick_is_earliest(self, sec5_basis):
        order, gains = greedy_selection(sec5_basis, np.linspace(0, 5, 500), 1, ridge=1e-8)
        assert order[0] == 0
        assert gains[0] == pytest.approx(np.log1p(9 / 1e-8))

    def test_rejects_bad_arguments(self, sec5_basis):
        with pytest.raises(ValueError, match="L=10 must be >= N=20"):
            greedy_schedule(sec5_basis, 5.0, 10, 20)
        with pytest.raises(ValueError, match="ridge"):
            greedy_schedule(sec5_basis, 5.0, 100, 20, ridge=0.0)
        with pytest.raises(ValueError, match="exceed 2M"):
            greedy_schedule(sec5_basis, 5.0, 100, 8)

    @pytest.mark.parametrize("M, N, L", [(1, 10, 200), (3, 40, 800), (5, 100, 1000)])
    def test_rank_one_consistency_and_monotone(self, M, N, L):
        basis = FrequencyBasis.from_omegas(np.linspace(1.3, 15.0, M))
        grid = np.linspace(0, 5, L)
        ridge = 1e-8
        order, gains = greedy_selection(basis, grid, N, ridge)
        P = regressor_psi(basis, grid[order])
        R = ridge * np.eye(basis.dim, dtype=complex)
        for k in range(N):
            assert gains[k] == pytest.approx(logdet_gain(R, P[k]), rel=1e-8)
            if k >= basis.dim:
                # once R is well conditioned, a determinant difference is an independent check
                expected = direct_logdet(R + np.outer(P[k], P[k].conj())) - direct_logdet(R)
                assert gains[k] == pytest.approx(expected, rel=1e-8)
            R = R + np.outer(P[k], P[k].conj())
        assert np.all(gains > 0)

    def test_grid_exclusivity_and_spacing(self, sec5_basis):
        T, L = 5.0, 1000
        s = greedy_schedule(sec5_basis, T, L, 200)
        assert np.unique(s.times).size == 200
        assert s.min_spacing() >= T / L - 1e-12

    def test_beats_uniform_logdet(self, sec5_input):
        T, N = 5.0, 100
        g = greedy_schedule(sec5_input.basis, T, 5000, N)
        u = uniform_schedule(T, N)
        ld = lambda s: psi_gram(build_regression(sec5_input, s)).logdet()
        assert ld(g) >= ld(u)


class TestDensity:
    def test_dc_only_design(self):
        basis = FrequencyBasis.from_omegas([])
        m = doptimal_density(basis, np.linspace(0, 1, 5))
        assert kw_statistic(m, basis) == 1.0

    def test_kw_bound_and_monotone(self, sec5_basis):
        history = []
        m = doptimal_density(sec5_basis, uniform_measure(5.0, 2000).grid, kw_tol=1e-3,
                             callback=lambda i, ld, kw: history.append(ld))
        assert kw_statistic(m, sec5_basis) <= 9 * 1.001
        assert np.all(np.diff(history) >= -1e-12)
        assert abs(m.weights.sum() - 1) < 1e-12

    def test_dominates_random_simplex_points(self, sec5_basis, rng):
        grid = uniform_measure(5.0, 400).grid
        m = doptimal_density(sec5_basis, grid, kw_tol=1e-4)
        best = expected_info(m, sec5_basis, 1).logdet()
        for _ in range(100):
            w = rng.dirichlet(np.ones(grid.size))
            assert expected_info(DesignMeasure(grid, w), sec5_basis, 1).logdet() <= best
        # uniform weights baseline
        assert expected_info(DesignMeasure(grid, np.full(400, 1 / 400)), sec5_basis, 1).logdet() <= best

    def test_not_converged_carries_best_iterate(self, sec5_basis):
        with pytest.raises(NotConverged) as info:
            doptimal_density(sec5_basis, np.linspace(0, 5, 300), max_iters=3, kw_tol=1e-9)
        assert isinstance(info.value.measure, DesignMeasure)
        assert info.value.kw_statistic > 9

    def test_rejects_small_grid(self, sec5_basis):
        with pytest.raises(ValueError, match="2M\\+1"):
            doptimal_density(sec5_basis, np.linspace(0, 5, 5))


class TestSampling:
    def test_point_mass(self):
        m = DesignMeasure(np.linspace(0, 5, 11), np.eye(11)[4], 5.0)
        s = sample_schedule(m, 200, seed=1)
        lo, hi = m.cell_edges()[4:6]
        assert np.all((s.times >= lo) & (s.times <= hi))

    def test_uniform_mean(self):
        T, N = 5.0, 100_000
        s = sample_schedule(uniform_measure(T, 1000), N, seed=2)
        assert abs(s.times.mean() - T / 2) <= 4 * (T / np.sqrt(12)) / np.sqrt(N)
        assert s.times.min() >= 0 and s.times.max() <= T

    def test_deterministic(self):
        m = uniform_measure(5.0, 100)
        np.testing.assert_array_equal(sample_schedule(m, 50, seed=7).times, sample_schedule(m, 50, seed=7).times)

    def test_zero_weight_cells_never_drawn(self):
        w = np.zeros(10)
        w[[2, 7]] = 0.5
        m = DesignMeasure(np.arange(10.0), w, 10.0)
        cells = np.searchsorted(m.cell_edges(), sample_schedule(m, 5000, seed=3).times, side="right") - 1
        assert set(np.unique(cells)) <= {2, 7}


@pytest.mark.parametrize("N, expected", [(2, [0.0, 5.0]), (1, [0.0])])
def test_uniform_schedule(N, expected):
    np.testing.assert_array_equal(uniform_schedule(5.0, N).times, expected)


def test_uniform_schedule_spacing():
    np.testing.assert_allclose(np.diff(uniform_schedule(5.0, 6).times), 1.0, rtol=0, atol=1e-15)
