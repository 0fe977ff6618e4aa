import numpy as np
import pytest

from if_portfolio.core.exceptions import ConfigError, IFConditionViolated
from if_portfolio.core.market_model import MarketModel
from if_portfolio.core.objectives import CriterionId, PortfolioWeights
from if_portfolio.fuzzy.scalarization import (
    IFGoal, PhiObjective, ScalarizationMode, ScalarizedProblem, chebyshev_problem, check_if_condition,
    component_values, eval_component, eval_phi, make_goal, phi_batch, scalarize, smooth_phi, subgrad_phi,
)
from if_portfolio.fuzzy.shapes import MembershipShape, ShapeRole
from if_portfolio.optimization.bounds import AspirationBounds, CriterionBounds
from if_portfolio.optimization.solver import minimize
from if_portfolio.validation.oracle import SamplingScheme, oracle_min, sample

from .conftest import MV

E, V, S = CriterionId.NEG_EXPECTED_RETURN, CriterionId.VARIANCE, CriterionId.NEG_SHARPE
KINK = np.array([0.75, 0.25])


class TestGoals:
    def test_linear_pair_sums_to_one(self, identity_bounds):
        goal = make_goal(E, identity_bounds)
        t = goal.grid()
        assert len(t) == 1000
        assert np.max(np.abs(goal.mu_value(t) + goal.nu_value(t) - 1.0)) <= 1e-12
        check_if_condition(goal)

    def test_exponential_membership_leaves_hesitation(self, identity_bounds):
        goal = make_goal(V, identity_bounds, 'exp:2', 'linear')
        t = goal.grid()
        assert np.all(goal.mu_value(t) + goal.nu_value(t) <= 1.0 + 1e-12)
        assert goal.mu_value(0.75) + goal.nu_value(0.75) < 1.0

    def test_violation_reports_worst_point(self, identity_bounds):
        with pytest.raises(IFConditionViolated) as info:
            make_goal(V, identity_bounds, 'table:0.5:0.9', 'linear')
        assert 1.39 < info.value.worst_sum <= 1.4 + 1e-12
        assert info.value.worst_t == pytest.approx(0.75, abs=1e-3)

    def test_to_dict(self, identity_bounds):
        payload = make_goal(E, identity_bounds, 'exp:2', 'linear').to_dict()
        assert payload == {'criterion': 'neg_expected_return', 'y1': -0.02, 'y0': -0.01,
                           'mu': 'exp:2.0', 'nu': 'linear'}


class TestProblem:
    def test_fuzzy_components(self, identity_model, identity_bounds):
        problem = scalarize(identity_model, identity_bounds, criteria=MV)
        assert problem.component_names == ('eta_neg_expected_return', 'eta_variance',
                                           'nu_neg_expected_return', 'nu_variance')
        assert problem.criteria == MV

    def test_crisp_keeps_linear_eta_only(self, identity_model, identity_bounds):
        problem = scalarize(identity_model, identity_bounds, {E: ('exp:3', 'exp:3')}, MV, 'crisp')
        assert problem.component_names == ('eta_neg_expected_return', 'eta_variance')
        assert all(goal.mu.spec == 'linear' for goal in problem.goals)
        assert chebyshev_problem(identity_model, identity_bounds, MV).component_names == problem.component_names

    def test_crisp_rejects_nonlinear_goals(self, identity_model, identity_bounds):
        goal = make_goal(E, identity_bounds, 'exp:2', 'linear')
        with pytest.raises(ConfigError):
            ScalarizedProblem(identity_model, (goal,), ScalarizationMode.CRISP)

    def test_duplicate_criteria(self, identity_model, identity_bounds):
        goal = make_goal(E, identity_bounds)
        with pytest.raises(ConfigError):
            ScalarizedProblem(identity_model, (goal, goal))

    def test_three_criteria_give_six_components(self, paper_model):
        bounds = AspirationBounds(entries=(
            CriterionBounds(E, -0.0462, -0.0097, PortfolioWeights.vertex(7, 1), 5),
            CriterionBounds(V, 0.002, 0.0157, PortfolioWeights.uniform(7), 1),
            CriterionBounds(S, -0.45, -0.05, PortfolioWeights.uniform(7), 5),
        ))
        problem = scalarize(paper_model, bounds)
        assert problem.n_components == 6
        assert problem.to_dict()['mode'] == 'fuzzy'


class TestPhi:
    @pytest.fixture
    def crisp(self, identity_model, identity_bounds):
        return scalarize(identity_model, identity_bounds, criteria=MV, mode='crisp')

    @pytest.fixture
    def fuzzy(self, identity_model, identity_bounds):
        return scalarize(identity_model, identity_bounds, criteria=MV)

    def test_value_and_active_set_at_the_kink(self, crisp, fuzzy):
        value, active = eval_phi(crisp, KINK)
        assert value == pytest.approx(0.25, abs=1e-12)
        assert active == (0, 1)
        value, active = eval_phi(fuzzy, KINK)
        assert active == (0, 1, 2, 3)

    def test_single_active_component(self, crisp):
        value, active = eval_phi(crisp, [0.5, 0.5])
        assert value == pytest.approx(0.5)
        assert active == (0,)

    def test_subgradient_uses_least_active_index(self, crisp):
        # eta of E* has slope 1 / (y0 - y1) = 100 and grad E* = -L
        assert subgrad_phi(crisp, KINK) == pytest.approx(np.array([-2.0, -1.0]))

    def test_components_clamp_at_the_bounds(self, fuzzy):
        assert eval_component(fuzzy, 0, [1.0, 0.0]) == 0.0
        assert eval_component(fuzzy, 2, [1.0, 0.0]) == 0.0
        assert eval_component(fuzzy, 1, [1.0, 0.0]) == 1.0
        with pytest.raises(IndexError):
            eval_component(fuzzy, 4, KINK)

    def test_smoothing_bounds(self, fuzzy):
        rng = np.random.default_rng(4)
        for x in rng.dirichlet(np.ones(2), size=50):
            phi, _ = eval_phi(fuzzy, x)
            for tau in (1e-2, 1e-4):
                value, grad = smooth_phi(fuzzy, x, tau)
                assert phi <= value <= phi + tau * np.log(fuzzy.n_components) + 1e-15
                assert grad.shape == (2,)

    def test_smoothing_needs_positive_temperature(self, fuzzy):
        with pytest.raises(ConfigError):
            smooth_phi(fuzzy, KINK, 0.0)

    def test_batch_matches_pointwise(self, fuzzy):
        X = np.random.default_rng(6).dirichlet(np.ones(2), size=100)
        expected = np.array([eval_phi(fuzzy, x)[0] for x in X])
        assert phi_batch(fuzzy, X) == pytest.approx(expected, abs=1e-15)
        assert component_values(fuzzy, X[0]).shape == (4,)

    def test_batch_propagates_undefined_sharpe(self, singular_model):
        bounds = AspirationBounds(entries=(
            CriterionBounds(E, -0.02, -0.01, PortfolioWeights.vertex(2, 0), 1),
            CriterionBounds(V, 0.0, 1.0, PortfolioWeights.uniform(2), 0),
            CriterionBounds(S, -0.02, 0.0, PortfolioWeights.vertex(2, 0), None),
        ))
        problem = scalarize(singular_model, bounds)
        values = phi_batch(problem, np.array([[0.5, 0.5], [1.0, 0.0]]))
        assert np.isnan(values[0])
        assert np.isfinite(values[1])

    @pytest.mark.parametrize('mode', ['crisp', 'fuzzy'])
    def test_solver_finds_the_kink(self, identity_model, identity_bounds, fast_cfg, mode):
        problem = scalarize(identity_model, identity_bounds, criteria=MV, mode=mode)
        report = minimize(PhiObjective(problem), fast_cfg)
        assert report.objective == pytest.approx(0.25, abs=1e-5)
        assert report.x_star.tolist() == pytest.approx(KINK.tolist(), abs=1e-4)
        assert report.membership_levels.max() == pytest.approx(report.objective)
        assert report.criterion_values.neg_sharpe is None
        assert any(name == 'polish' for name, _, _ in report.trajectories[0].phases)

    def test_solver_never_loses_to_a_grid(self, identity_model, identity_bounds, fast_cfg):
        problem = scalarize(identity_model, identity_bounds, {E: ('exp:2', 'linear'), V: ('linear', 'exp:1')}, MV)
        objective = PhiObjective(problem)
        report = minimize(objective, fast_cfg)
        # crossing of eta(E*) and eta(V), found by bisection
        assert report.objective == pytest.approx(0.372946339, abs=1e-5)
        assert report.x_star.weights[0] == pytest.approx(0.805346663, abs=1e-4)
        fixture = oracle_min(objective, sample(SamplingScheme.grid(997), 2))
        assert report.objective <= fixture.value + 1e-9
        assert fixture.value - report.objective <= 1e-2


def paper_bounds(scale_e=1.0, shift_e=0.0, scale_v=1.0):
    """Hand bounds of the seven-stock instance, optionally mapped through E* -> a E* - b, V -> c V."""
    return AspirationBounds(entries=(
        CriterionBounds(E, scale_e * -0.0462 - shift_e, scale_e * -0.0097 - shift_e,
                        PortfolioWeights.vertex(7, 1), 5),
        CriterionBounds(V, scale_v * 0.002, scale_v * 0.0157, PortfolioWeights.uniform(7), 1),
        CriterionBounds(S, -0.45, -0.05, PortfolioWeights.uniform(7), 5),
    ))


SHAPED = {E: ('exp:2', 'linear'), V: ('linear', 'exp:1.5'), S: ('linear', 'linear')}


def central_differences(f, x, h=1e-6):
    grad = np.empty_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2 * h)
    return grad


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


class TestPaperModelDerivatives:
    @pytest.fixture
    def problem(self, paper_model):
        return scalarize(paper_model, paper_bounds(), SHAPED)

    @pytest.fixture
    def points(self):
        return np.random.default_rng(21).dirichlet(np.ones(7), size=40)

    def interior(self, problem, x, margin=1e-3):
        """Every level away from 0 and 1, so no difference step reaches a clamp."""
        levels = component_values(problem, x)
        return bool(np.all((levels > margin) & (levels < 1.0 - margin)))

    def test_smoothed_gradient_matches_differences(self, problem, points):
        checked = 0
        for x in points:
            if not self.interior(problem, x):
                continue
            value, grad = smooth_phi(problem, x, 1e-2)
            numeric = central_differences(lambda z: smooth_phi(problem, z, 1e-2)[0], x)
            assert rel_err(grad, numeric) <= 1e-5
            checked += 1
        assert checked >= 10

    def test_subgradient_matches_differences_off_the_kinks(self, problem, points):
        checked = 0
        for x in points:
            values = component_values(problem, x)
            top, second = np.sort(values)[::-1][:2]
            if not self.interior(problem, x) or top - second < 1e-3:
                continue
            _, active = eval_phi(problem, x)
            assert len(active) == 1
            numeric = central_differences(lambda z: eval_phi(problem, z)[0], x)
            assert rel_err(subgrad_phi(problem, x), numeric) <= 1e-5
            checked += 1
        assert checked >= 10

    def test_small_temperature_sandwich(self, problem, points):
        for x in points:
            phi, _ = eval_phi(problem, x)
            value, _ = smooth_phi(problem, x, 1e-6)
            assert 0.0 <= value - phi <= 2e-5


class TestAffineInvariance:
    def test_rescaled_criteria_leave_phi_unchanged(self, paper_model):
        a, b, c = 3.0, 0.01, 2.5
        moved = MarketModel(paper_model.labels, a * paper_model.mean_returns + b,
                            c * paper_model.covariance, paper_model.risk_free_rate)
        specs = {E: SHAPED[E], V: SHAPED[V]}
        original = scalarize(paper_model, paper_bounds(), specs, criteria=MV)
        rescaled = scalarize(moved, paper_bounds(scale_e=a, shift_e=b, scale_v=c), specs, criteria=MV)
        for x in np.random.default_rng(5).dirichlet(np.ones(7), size=50):
            assert eval_phi(rescaled, x)[0] == pytest.approx(eval_phi(original, x)[0], abs=1e-12)


class TestIFConditionLimits:
    def test_steep_nonmembership_is_accepted(self, identity_bounds):
        goal = make_goal(V, identity_bounds, 'linear', 'exp:1000')
        levels = goal.nu_value(goal.grid())
        assert np.all(np.isfinite(levels))
        assert levels[-1] == pytest.approx(1.0, abs=1e-15)

    def test_non_finite_levels_are_rejected(self):
        goal = IFGoal(V, 0.5, 0.5, MembershipShape.parse('linear', ShapeRole.MEMBERSHIP),
                      MembershipShape.parse('linear', ShapeRole.NONMEMBERSHIP))
        with np.errstate(invalid='ignore', divide='ignore'):
            with pytest.raises(IFConditionViolated) as info:
                check_if_condition(goal)
        assert info.value.worst_t == 0.5
        assert np.isnan(info.value.worst_sum)
