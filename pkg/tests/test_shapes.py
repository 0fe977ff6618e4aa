import numpy as np
import pytest

from if_portfolio.core.exceptions import BadShape
from if_portfolio.fuzzy.shapes import MembershipShape, ShapeKind, ShapeRole

MEMBER, NONMEMBER = ShapeRole.MEMBERSHIP, ShapeRole.NONMEMBERSHIP
Y1, Y0 = 2.0, 6.0


class TestLinear:
    def test_membership_profile(self):
        mu = MembershipShape.parse('linear', MEMBER)
        assert mu.value(Y1, Y1, Y0) == 1.0
        assert mu.value(Y0, Y1, Y0) == 0.0
        assert mu.value(3.0, Y1, Y0) == pytest.approx(0.75)
        assert mu.value(-10.0, Y1, Y0) == 1.0
        assert mu.value(10.0, Y1, Y0) == 0.0

    def test_nonmembership_profile(self):
        nu = MembershipShape.parse('linear', NONMEMBER)
        assert nu.value(Y1, Y1, Y0) == 0.0
        assert nu.value(5.0, Y1, Y0) == pytest.approx(0.75)
        assert nu.value(10.0, Y1, Y0) == 1.0

    def test_derivatives(self):
        mu = MembershipShape.parse('linear', MEMBER)
        assert mu.derivative(4.0, Y1, Y0) == pytest.approx(-0.25)
        # one-sided from inside at the ends, flat outside
        assert mu.derivative(Y1, Y1, Y0) == pytest.approx(-0.25)
        assert mu.derivative(Y0, Y1, Y0) == pytest.approx(-0.25)
        assert mu.derivative(1.0, Y1, Y0) == 0.0
        assert mu.derivative(7.0, Y1, Y0) == 0.0

    def test_scalar_and_array_results(self):
        mu = MembershipShape.parse('linear', MEMBER)
        assert isinstance(mu.value(3.0, Y1, Y0), float)
        values = mu.value(np.array([2.0, 4.0, 6.0]), Y1, Y0)
        assert isinstance(values, np.ndarray)
        assert values.tolist() == pytest.approx([1.0, 0.5, 0.0])


class TestExponential:
    def test_endpoints_and_midpoint(self):
        mu = MembershipShape.parse('exp:2', MEMBER)
        assert mu.kind == ShapeKind.EXPONENTIAL
        assert mu.value(Y1, Y1, Y0) == 1.0
        assert mu.value(Y0, Y1, Y0) == 0.0
        expected = (np.exp(-1.0) - np.exp(-2.0)) / (1.0 - np.exp(-2.0))
        assert mu.value(4.0, Y1, Y0) == pytest.approx(expected, rel=1e-12)

    def test_monotone(self):
        t = np.linspace(Y1, Y0, 200)
        mu = MembershipShape.parse('exp:3.5', MEMBER).value(t, Y1, Y0)
        nu = MembershipShape.parse('exp:3.5', NONMEMBER).value(t, Y1, Y0)
        assert np.all(np.diff(mu) < 0)
        assert np.all(np.diff(nu) > 0)

    def test_derivative_matches_differences(self):
        nu = MembershipShape.parse('exp:1.5', NONMEMBER)
        for t in (2.5, 4.0, 5.5):
            numeric = (nu.value(t + 1e-6, Y1, Y0) - nu.value(t - 1e-6, Y1, Y0)) / 2e-6
            assert nu.derivative(t, Y1, Y0) == pytest.approx(numeric, rel=1e-6)

    def test_steep_nonmembership_stays_finite(self):
        nu = MembershipShape.parse('exp:1000', NONMEMBER)
        s = np.linspace(0.0, 1.0, 1001)
        values = nu.profile(s)
        slopes = nu.profile_slope(s)
        assert np.all(np.isfinite(values)) and np.all(np.isfinite(slopes))
        assert values[0] == 0.0
        assert values[-1] == pytest.approx(1.0, abs=1e-15)
        assert np.all(np.diff(values) >= 0.0)
        assert float(nu.profile(0.999)) == pytest.approx(np.exp(-1.0), rel=1e-12)
        assert float(nu.profile_slope(1.0)) == pytest.approx(1000.0, rel=1e-12)


class TestScalarLevels:
    @pytest.mark.parametrize('spec', ['linear', 'exp:2', 'exp:1000', 'table:0.5:0.4'])
    @pytest.mark.parametrize('role', [MEMBER, NONMEMBER])
    def test_matches_value_and_derivative(self, spec, role):
        shape = MembershipShape.parse(spec, role)
        for t in (1.0, Y1, 2.5, 4.0, 5.9, Y0, 7.0):
            level, slope = shape.level_and_slope(t, Y1, Y0)
            assert level == pytest.approx(shape.value(t, Y1, Y0), abs=1e-12)
            assert slope == pytest.approx(shape.derivative(t, Y1, Y0), rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize('spec', ['exp:0', 'exp:-1', 'exp:abc', 'exp:inf'])
    def test_bad_scale(self, spec):
        with pytest.raises(BadShape):
            MembershipShape.parse(spec, MEMBER)


class TestTable:
    def test_interpolation(self):
        mu = MembershipShape.parse('table:0.5:0.3', MEMBER)
        assert mu.value(3.0, Y1, Y0) == pytest.approx(0.65)
        assert mu.value(4.0, Y1, Y0) == pytest.approx(0.3)
        assert mu.value(5.0, Y1, Y0) == pytest.approx(0.15)

    def test_kink_slope_is_taken_from_the_right_segment(self):
        mu = MembershipShape.parse('table:0.5:0.3', MEMBER)
        assert mu.derivative(4.0, Y1, Y0) == pytest.approx(-0.6 / 4.0)
        assert mu.derivative(Y0, Y1, Y0) == pytest.approx(-0.6 / 4.0)
        assert mu.derivative(Y1, Y1, Y0) == pytest.approx(-1.4 / 4.0)

    @pytest.mark.parametrize('spec, role', [
        ('table:0.3:0.5,0.6:0.7', MEMBER),
        ('table:0.3:0.5,0.6:0.2', NONMEMBER),
        ('table:1.2:0.5', MEMBER),
        ('table:0.0:0.5', MEMBER),
        ('table:0.6:0.5,0.4:0.3', MEMBER),
        ('table:0.5:1.5', NONMEMBER),
        ('table:0.5', MEMBER),
        ('table:', MEMBER),
    ])
    def test_rejected_tables(self, spec, role):
        with pytest.raises(BadShape):
            MembershipShape.parse(spec, role)


class TestParse:
    @pytest.mark.parametrize('spec', ['cubic', 'linear:3', ''])
    def test_unknown(self, spec):
        with pytest.raises(BadShape):
            MembershipShape.parse(spec, MEMBER)

    @pytest.mark.parametrize('spec, role', [
        ('linear', MEMBER), ('exp:2.5', NONMEMBER), ('table:0.25:0.5,0.75:0.1', MEMBER),
    ])
    def test_spec_round_trip(self, spec, role):
        shape = MembershipShape.parse(spec, role)
        assert MembershipShape.parse(shape.spec, role) == shape

    def test_instances_keep_their_role(self):
        nu = MembershipShape(ShapeKind.LINEAR, NONMEMBER)
        assert MembershipShape.parse(nu, 'nonmembership') is nu
        with pytest.raises(BadShape):
            MembershipShape.parse(nu, MEMBER)

    def test_case_and_whitespace(self):
        assert MembershipShape.parse('  EXP:2 ', MEMBER).scale == 2.0
