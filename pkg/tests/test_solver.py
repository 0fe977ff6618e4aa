import time

import numpy as np
import pytest

from if_portfolio.core.exceptions import ConfigError, NonFiniteInput, SolverFailure
from if_portfolio.core.objectives import ALL_CRITERIA, CriterionId
from if_portfolio.fuzzy.scalarization import PhiObjective, scalarize
from if_portfolio.optimization.bounds import compute_bounds
from if_portfolio.optimization.solver import (
    CriterionObjective, SolverConfig, default_smoothing_schedule, default_starts, minimize, project_simplex,
)


class TestProjection:
    @pytest.mark.parametrize('v, expected', [
        ([0.5, 0.5], [0.5, 0.5]),
        ([2.0, 0.0], [1.0, 0.0]),
        ([0.6, 0.6], [0.5, 0.5]),
        ([3.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
        ([-1.0, -1.0, -1.0], [1 / 3, 1 / 3, 1 / 3]),
    ])
    def test_known_projections(self, v, expected):
        assert project_simplex(v).tolist() == pytest.approx(expected, abs=1e-15)

    def test_random_vectors_land_on_simplex(self):
        rng = np.random.default_rng(8)
        for v in rng.normal(scale=3.0, size=(200, 6)):
            x = project_simplex(v).weights
            assert np.all(x >= 0.0)
            assert x.sum() == pytest.approx(1.0, abs=1e-12)
            # optimality: v - x is constant on the support
            support = x > 0
            shift = v[support] - x[support]
            assert np.ptp(shift) == pytest.approx(0.0, abs=1e-12)
            assert np.all(v[~support] <= shift[0] + 1e-12)

    def test_projection_satisfies_the_variational_inequality(self):
        rng = np.random.default_rng(13)
        vertices = np.eye(5)
        for v in rng.normal(scale=2.0, size=(100, 5)):
            x = project_simplex(v).weights
            assert np.all((vertices - x) @ (v - x) <= 1e-9)

    def test_projection_is_idempotent(self):
        x = np.random.default_rng(1).dirichlet(np.ones(5))
        assert project_simplex(x).weights == pytest.approx(x, abs=1e-15)

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteInput):
            project_simplex([np.nan, 1.0])


class TestStarts:
    def test_order_and_determinism(self):
        starts = default_starts(7, 16, seed=42)
        assert len(starts) == 16
        assert starts[0].tolist() == pytest.approx([1 / 7] * 7)
        assert starts[1].weights[0] == pytest.approx(1 - 1e-3 + 1e-3 / 7)
        assert np.argmax(starts[7].weights) == 6
        again = default_starts(7, 16, seed=42)
        assert all(np.array_equal(a.weights, b.weights) for a, b in zip(starts, again))
        other = default_starts(7, 16, seed=43)
        assert not np.array_equal(starts[-1].weights, other[-1].weights)

    def test_few_starts(self):
        assert len(default_starts(5, 1, seed=0)) == 1
        two_assets = default_starts(2, 6, seed=0)
        assert len(two_assets) == 6
        assert np.argmax(two_assets[2].weights) == 1

    def test_invalid(self):
        with pytest.raises(ConfigError):
            default_starts(1, 4, seed=0)
        with pytest.raises(ConfigError):
            default_starts(3, 0, seed=0)


class TestSolverConfig:
    def test_schedule(self):
        taus = default_smoothing_schedule()
        assert taus[0] == 1e-2 and taus[-1] == 1e-6
        assert all(b < a for a, b in zip(taus, taus[1:]))

    @pytest.mark.parametrize('kwargs', [
        {'max_iters': 0}, {'tol_step': -1.0}, {'backtrack_factor': 1.0},
        {'armijo_c': 0.0}, {'smoothing_schedule': ()}, {'smoothing_schedule': (1e-3, 0.0)},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            SolverConfig(**kwargs)

    def test_overrides_skip_none(self):
        cfg = SolverConfig().with_overrides(seed=7, n_starts=None)
        assert cfg.seed == 7
        assert cfg.n_starts == SolverConfig().n_starts


class TestMinimize:
    def test_identity_variance(self, identity_model, fast_cfg):
        report = minimize(CriterionObjective(identity_model, CriterionId.VARIANCE), fast_cfg)
        assert report.converged
        assert report.objective == pytest.approx(0.5, abs=1e-10)
        assert report.x_star.tolist() == pytest.approx([0.5, 0.5], abs=1e-5)
        assert len(report.trajectories) == fast_cfg.n_starts

    def test_linear_objective_reaches_best_vertex(self, paper_model, fast_cfg):
        report = minimize(CriterionObjective(paper_model, CriterionId.NEG_EXPECTED_RETURN), fast_cfg)
        assert report.objective == pytest.approx(-0.0462, abs=1e-12)
        assert int(np.argmax(report.x_star.weights)) == 1

    def test_report_annotations(self, paper_model, fast_cfg):
        report = minimize(CriterionObjective(paper_model, CriterionId.VARIANCE), fast_cfg)
        assert report.criterion_values.variance == pytest.approx(report.objective)
        payload = report.to_dict()
        assert payload['best_start'] == report.best_start
        assert payload['trajectories'][0]['phases'][0]['phase'] == 'gradient'

    def test_explicit_starts(self, identity_model, fast_cfg):
        report = minimize(CriterionObjective(identity_model, CriterionId.VARIANCE), fast_cfg,
                          starts=[[0.9, 0.1]])
        assert len(report.trajectories) == 1
        assert report.trajectories[0].start.tolist() == pytest.approx([0.9, 0.1])

    def test_exhausted_budget(self, paper_model):
        cfg = SolverConfig(max_iters=1, n_starts=3)
        objective = CriterionObjective(paper_model, CriterionId.VARIANCE)
        with pytest.raises(SolverFailure) as info:
            minimize(objective, cfg)
        assert info.value.report is not None
        assert not info.value.report.converged
        report = minimize(objective, cfg, strict=False)
        assert all(t.termination == 'max_iters' for t in report.trajectories)

    def test_needs_dimension(self):
        class Bare:
            smooth = True

            def value(self, x):
                return float(x @ x)

            def direction(self, x):
                return 2 * x

        with pytest.raises(ConfigError):
            minimize(Bare())
        report = minimize(Bare(), SolverConfig(n_starts=2), n_assets=3)
        assert report.objective == pytest.approx(1 / 3, abs=1e-10)

    @pytest.mark.slow
    @pytest.mark.parametrize('c', [CriterionId.VARIANCE, CriterionId.NEG_SHARPE])
    def test_local_minima_agree(self, paper_model, c):
        report = minimize(CriterionObjective(paper_model, c), SolverConfig(n_starts=16))
        finals = [t.final_value for t in report.trajectories if t.converged]
        assert len(finals) == 16
        assert max(finals) - min(finals) <= 1e-6


class RecordingObjective(PhiObjective):
    """Phi handle remembering every point the solver asks a direction for."""

    def __init__(self, problem):
        super().__init__(problem)
        self.visited = []

    def direction(self, x):
        self.visited.append(x.copy())
        return super().direction(x)

    def smoothed(self, x, tau):
        self.visited.append(x.copy())
        return super().smoothed(x, tau)


class TestNonsmoothDescent:
    @pytest.fixture(scope='class')
    def fuzzy_problem(self, paper_model):
        return scalarize(paper_model, compute_bounds(paper_model), {CriterionId.VARIANCE: ('exp:2', 'linear')})

    def test_iterates_stay_feasible_and_never_raise_phi(self, fuzzy_problem):
        objective = RecordingObjective(fuzzy_problem)
        report = minimize(objective, SolverConfig(), starts=[np.full(7, 1 / 7)])
        # directions are only requested at the start of a phase and at accepted iterates
        points = np.array(objective.visited)
        assert len(points) > len(report.trajectories[0].phases)
        assert np.all(points >= 0.0)
        assert points.sum(axis=1) == pytest.approx(np.ones(len(points)), abs=1e-12)
        values = np.array([objective.value(x) for x in points])
        assert np.all(np.diff(values) <= 1e-15)
        assert report.objective <= values[0]

    def test_default_fuzzy_solve_fits_the_time_budget(self, paper_model):
        problem = scalarize(paper_model, compute_bounds(paper_model), criteria=ALL_CRITERIA)
        started = time.perf_counter()
        report = minimize(PhiObjective(problem), SolverConfig())
        elapsed = time.perf_counter() - started
        assert report.converged
        assert len(report.trajectories) == 16
        assert elapsed < 60.0
