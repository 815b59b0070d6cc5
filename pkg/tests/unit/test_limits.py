"""
Tests for the closed-form limit values, the brute-force oracle, the cone/plane
pair and the continuation sweep.
"""
import math
from types import SimpleNamespace

import numpy as np
import pytest

from apps.core.exceptions import (
    AdmissibilityError,
    DomainMismatchError,
    StagnationError,
    SweepAborted,
    UnsupportedExponentsError,
    ValidationError,
)
from apps.eigensolver import SolverOptions
from apps.limits import (
    LimitSpec,
    ansatz_config,
    ansatz_oracle_rectangle,
    ansatz_singular_set,
    ansatz_slopes,
    apex_formula_value,
    balance_defect,
    ball_ansatz,
    compare_with_oracle,
    cone_plane_pair,
    continuation_sweep,
    lambda_inf_ball,
    lambda_inf_rectangle,
    limit_quotient,
    optimal_touch_point,
    profile_max_bruteforce,
    reference_value,
)
from tests.factories import DiskGridFactory, LimitSpecFactory, RectangleGridFactory

BRANCH_TWO = LimitSpec(gamma=1 / 3, Q=1.0, R=1.0, L=0.25)


class TestLimitSpec:
    @pytest.mark.parametrize(
        'kwargs, field',
        [
            ({'gamma': 0.0, 'Q': 1.0, 'R': 1.0}, 'gamma'),
            ({'gamma': 1.0, 'Q': 1.0, 'R': 1.0}, 'gamma'),
            ({'gamma': 0.5, 'Q': -1.0, 'R': 1.0}, 'Q'),
            ({'gamma': 0.5, 'Q': 1.0, 'R': math.nan}, 'R'),
            ({'gamma': 0.5, 'Q': 1.0, 'R': 2.0, 'L': 3.0}, 'L'),
        ],
    )
    def test_invalid(self, kwargs, field):
        with pytest.raises(ValidationError) as excinfo:
            LimitSpec(**kwargs)
        assert field in excinfo.value.detail

    def test_schedule_exponents(self):
        e = LimitSpec(gamma=0.25, Q=2.0, R=1.0).exponents(8.0)
        assert (e.p, e.q, e.alpha, e.beta) == (8.0, 16.0, 2.0, 12.0)


class TestBallValue:
    def test_half_gamma(self, half_spec):
        assert lambda_inf_ball(half_spec) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize('R', [1.0, 2.0, 5.0])
    @pytest.mark.parametrize('gamma', [0.999, 0.001])
    def test_scalar_limits(self, gamma, R):
        assert lambda_inf_ball(LimitSpec(gamma=gamma, Q=1.0, R=R)) == pytest.approx(1 / R, rel=0.01)

    def test_radius_homogeneity(self):
        for _ in range(20):
            s = LimitSpecFactory(R=1.0)
            scaled = LimitSpec(gamma=s.gamma, Q=s.Q, R=2.0)
            factor = 2.0 ** (-s.gamma - s.plane_power)
            assert lambda_inf_ball(scaled) == pytest.approx(lambda_inf_ball(s) * factor, rel=1e-12)

    def test_extreme_exponents_stay_finite(self):
        value = lambda_inf_ball(LimitSpec(gamma=1e-9, Q=1e6, R=1.0))
        assert math.isfinite(value) and value > 0

    def test_profile_oracle_identity(self):
        for _ in range(50):
            s = LimitSpecFactory()
            s_star, M = profile_max_bruteforce(s, 2000)
            assert 1 / M == pytest.approx(lambda_inf_ball(s), rel=1e-8)
            assert s_star == pytest.approx(optimal_touch_point(s), abs=1e-6 * s.R)

    def test_sample_floor(self, half_spec):
        with pytest.raises(ValidationError):
            profile_max_bruteforce(half_spec, 999)

    def test_slopes(self, half_spec):
        theta, k1, k2 = ansatz_slopes(half_spec)
        assert k1 == pytest.approx(2.0)
        assert k2 == pytest.approx(2.0)
        assert theta == pytest.approx(4.0)
        config = ball_ansatz(half_spec)
        assert config.theta(half_spec) == pytest.approx(theta)
        assert config.normalization_defect(half_spec) <= 1e-12


class TestRectangleValue:
    def test_branch_two(self):
        value = lambda_inf_rectangle(LimitSpec(gamma=0.5, Q=1.0, R=2.0, L=0.5))
        assert value.branch == 2
        assert value.value == pytest.approx(2 / math.sqrt(3), abs=1e-12)
        assert float(value) == value.value

    def test_branch_one_is_the_ball_value(self):
        s = LimitSpec(gamma=0.3, Q=1.0, R=1.0, L=0.9)
        value = lambda_inf_rectangle(s)
        assert value.branch == 1
        assert value.value == lambda_inf_ball(LimitSpec(gamma=0.3, Q=1.0, R=1.0))

    def test_thresholds(self):
        value = lambda_inf_rectangle(BRANCH_TWO)
        assert value.paper_threshold == pytest.approx(0.5)
        assert value.construction_threshold == pytest.approx(1 / 3)
        assert value.value == pytest.approx(2.7735, rel=1e-4)

    def test_square_in_branch_two_is_infinite(self):
        value = lambda_inf_rectangle(LimitSpec(gamma=0.5, Q=0.2, R=1.0, L=1.0))
        assert value.branch == 2
        assert math.isinf(value.value)

    def test_apex_formula(self):
        expected = 1 / (0.25 ** (1 / 3) * 0.75 ** (2 / 3))
        assert apex_formula_value(BRANCH_TWO) == pytest.approx(expected, rel=1e-12)

    def test_requires_half_height(self, half_spec):
        with pytest.raises(ValidationError):
            lambda_inf_rectangle(half_spec)


class TestRectangleOracle:
    def test_branch_two_discrepancy(self):
        report = compare_with_oracle(BRANCH_TWO, 2000)
        assert report.paper_value == pytest.approx(2.7735, rel=1e-4)
        assert report.oracle_value == pytest.approx(1.9230, rel=1e-3)
        assert not report.agreement
        assert report.config.a == pytest.approx(0.75, abs=1e-3)
        assert report.as_dict()['branch'] == 2

    @pytest.mark.parametrize('gamma, Q', [(0.3, 1.0), (0.2, 2.0)])
    def test_branch_one_agreement_and_height_independence(self, gamma, Q):
        R = 1.0
        values = []
        for L in (0.8 * R, 0.9 * R, R):
            report = compare_with_oracle(LimitSpec(gamma=gamma, Q=Q, R=R, L=L), 2000)
            assert report.branch == 1
            assert report.agreement
            values.append(report.oracle_value)
        np.testing.assert_allclose(values, values[0], rtol=1e-4)

    def test_oracle_decreases_with_height(self):
        values = [
            ansatz_oracle_rectangle(LimitSpec(gamma=1 / 3, Q=1.0, R=1.0, L=L), 1000)[1]
            for L in (0.2, 0.25, 0.3, 0.35)
        ]
        assert all(b <= a * (1 + 1e-9) for a, b in zip(values, values[1:], strict=False))

    def test_oracle_config_is_normalized(self):
        config, value = ansatz_oracle_rectangle(BRANCH_TWO, 1000)
        assert config.normalization_defect(BRANCH_TWO) <= 1e-12
        assert value == pytest.approx(1 / config.M)

    def test_ball_report(self, half_spec):
        report = compare_with_oracle(half_spec, 1000)
        assert report.agreement
        assert report.branch is None
        assert report.oracle_value == pytest.approx(2.0, rel=1e-8)


class TestConePlanePair:
    def test_disk_pair(self, half_spec):
        dom = DiskGridFactory(n=65)
        config = ansatz_config(half_spec)
        assert config.k1 == pytest.approx(2.0)
        pair = cone_plane_pair(half_spec, dom, config)
        pair.check(dom)
        assert pair.u.max() == pytest.approx(2.0)

        coupling_max = np.max(np.sqrt(pair.u * np.abs(pair.v)))
        assert 1 - 5 * dom.h <= coupling_max <= 1 + 5 * dom.h

    def test_limit_quotient(self, half_spec):
        dom = DiskGridFactory(n=65)
        pair = cone_plane_pair(half_spec, dom)
        assert limit_quotient(pair, half_spec, dom) == pytest.approx(2.0, rel=1e-3)
        assert balance_defect(pair, half_spec, dom) == pytest.approx(0.0, abs=1e-12)

    def test_limit_quotient_of_vanishing_pair(self, half_spec, disk):
        pair = cone_plane_pair(half_spec, disk).with_fields(v=np.zeros(disk.shape))
        with pytest.raises(AdmissibilityError):
            limit_quotient(pair, half_spec, disk)

    def test_rectangle_pair_is_mirror_symmetric(self):
        s = LimitSpec(gamma=0.5, Q=1.0, R=2.0, L=0.5)
        dom = RectangleGridFactory(R=2.0, L=0.5, nx=65, ny=17)
        pair = cone_plane_pair(s, dom, ansatz_config(s, 1000))
        np.testing.assert_allclose(pair.u, np.flip(pair.u, axis=1), atol=1e-12)
        np.testing.assert_allclose(pair.v, -np.flip(pair.v, axis=1), atol=1e-12)
        assert balance_defect(pair, s, dom) <= 1e-12

    def test_domain_mismatch(self, half_spec, square):
        with pytest.raises(DomainMismatchError):
            cone_plane_pair(half_spec, square)
        with pytest.raises(DomainMismatchError):
            cone_plane_pair(LimitSpec(gamma=0.5, Q=1.0, R=1.0, L=0.5), square)


class TestSingularSet:
    def test_disk(self, half_spec):
        singular = ansatz_singular_set(half_spec)
        assert singular.points == ((0.0, 0.0),)
        assert singular.circles == ()

    def test_mirrored_cones(self):
        config = ansatz_oracle_rectangle(BRANCH_TWO, 1000)[0]
        singular = ansatz_singular_set(BRANCH_TWO, config)
        assert len(singular.points) == 2
        assert len(singular.circles) == 2
        # apex at 3/4 with radius 1/4: the cones do not meet
        assert singular.segments == ()

    def test_distance(self, half_spec):
        singular = ansatz_singular_set(half_spec)
        np.testing.assert_allclose(singular.distance(np.array([3.0]), np.array([4.0])), [5.0])


def _fake_solver(fail_at=None, stall_at=None):
    calls = []

    def solve(dom, e, opts):
        calls.append((e.p, opts.warm_start))
        if e.p == fail_at:
            raise StagnationError('no decrease', {'iteration': 3})
        eigenvalue = 2.0**e.p
        return SimpleNamespace(
            eigenvalue=eigenvalue,
            lambda_root_p=2.1,
            iterations=7,
            converged=e.p != stall_at,
            stalled=e.p == stall_at,
            fields=f'fields@{e.p:g}',
        )

    solve.calls = calls
    return solve


class TestContinuationSweep:
    def test_rows_follow_the_schedule(self, half_spec, disk, monkeypatch):
        solve = _fake_solver()
        monkeypatch.setattr('apps.limits.sweep.solve_first_eigenpair', solve)
        rows = continuation_sweep(disk, half_spec, (4.0, 8.0, 16.0))

        assert [row.p for row in rows] == [4.0, 8.0, 16.0]
        for row in rows:
            assert row.q == half_spec.Q * row.p
            assert row.alpha == half_spec.gamma * row.p
            assert row.alpha / row.p + row.beta / row.q == pytest.approx(1.0)
            assert row.reference == pytest.approx(2.0)
            assert row.rel_gap == pytest.approx(0.05)
        assert [warm for _, warm in solve.calls] == [None, 'fields@4', 'fields@8']

    def test_abort_keeps_completed_rows(self, half_spec, disk, monkeypatch):
        monkeypatch.setattr('apps.limits.sweep.solve_first_eigenpair', _fake_solver(fail_at=8.0))
        with pytest.raises(SweepAborted) as excinfo:
            continuation_sweep(disk, half_spec, (4.0, 8.0, 16.0))
        assert excinfo.value.p == 8.0
        assert [row.p for row in excinfo.value.rows] == [4.0]
        assert isinstance(excinfo.value.cause, StagnationError)

    def test_stalled_rows_are_flagged(self, half_spec, disk, monkeypatch):
        monkeypatch.setattr('apps.limits.sweep.solve_first_eigenpair', _fake_solver(stall_at=8.0))
        rows = continuation_sweep(disk, half_spec, (4.0, 8.0, 16.0))
        assert [row.stalled for row in rows] == [False, True, False]
        assert [row.converged for row in rows] == [True, False, True]

    def test_unsupported_exponent_checked_before_solving(self, disk, monkeypatch):
        solve = _fake_solver()
        monkeypatch.setattr('apps.limits.sweep.solve_first_eigenpair', solve)
        s = LimitSpec(gamma=0.9, Q=1.0, R=1.0)
        with pytest.raises(UnsupportedExponentsError):
            continuation_sweep(disk, s, (32.0, 4.0))
        assert solve.calls == []

    def test_infinite_reference(self, monkeypatch):
        s = LimitSpec(gamma=0.5, Q=0.2, R=1.0, L=1.0)
        monkeypatch.setattr('apps.limits.sweep.solve_first_eigenpair', _fake_solver())
        rows = continuation_sweep(RectangleGridFactory(), s, (16.0,))
        assert math.isinf(reference_value(s))
        assert rows[0].reference is None
        assert rows[0].rel_gap is None

    def test_small_real_sweep(self, half_spec):
        dom = DiskGridFactory(n=17)
        opts = SolverOptions(max_iter=40, stall_tol=1e-1)
        rows = continuation_sweep(dom, half_spec, (4.0, 6.0), opts)
        assert len(rows) == 2
        assert all(row.eigenvalue > 0 for row in rows)


@pytest.mark.slow
def test_sweep_approaches_the_limit(half_spec):
    dom = DiskGridFactory(n=65)
    opts = SolverOptions(max_iter=400)
    rows = continuation_sweep(dom, half_spec, (4.0, 8.0, 16.0, 32.0, 64.0), opts)
    gaps = [abs(row.lambda_root_p - 2.0) for row in rows]
    assert gaps[-1] <= gaps[-2] <= gaps[-3]
    assert rows[-1].rel_gap <= 0.25
