"""
Tests for the coupled solver, its residuals and the scalar calibration oracles.
"""
import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy.special import jn_zeros

from apps.calculus import Exponents, FieldPair, constraint_value, coupling, rayleigh_quotient
from apps.core.exceptions import StagnationError, UnsupportedExponentsError, ValidationError
from apps.eigensolver import (
    SolverOptions,
    euler_lagrange_residual,
    scalar_dirichlet_eig,
    scalar_neumann_eig,
    solve_first_eigenpair,
    solve_scalar_neumann,
    system_reductions,
)
from apps.eigensolver.descent import ProjectedDescent
from apps.eigensolver.problems import CoupledProblem
from apps.eigensolver.projection import project_pair
from apps.eigensolver.solver import constant_mode_term, initial_pair
from apps.limits import cone_plane_pair
from tests.factories import DiskGridFactory, RectangleGridFactory, SolverOptionsFactory


@pytest.fixture
def quartic():
    return Exponents.from_pqa(4.0, 4.0, 2.0)


@pytest.fixture
def quick():
    return SolverOptionsFactory(max_iter=60, seed=3, stall_tol=1e-1)


def _non_increasing(history):
    return all(b <= a + 1e-12 * abs(a) for a, b in zip(history, history[1:], strict=False))


class TestSolverOptions:
    @pytest.mark.parametrize(
        'changes',
        [
            {'max_iter': 0},
            {'tol_grad': -1.0},
            {'backtrack_factor': 1.0},
            {'seed': -2},
            {'noise': 1.5},
        ],
    )
    def test_invalid(self, changes):
        with pytest.raises(ValidationError):
            SolverOptions(**changes)

    def test_evolve(self):
        opts = SolverOptions().evolve(max_iter=10)
        assert opts.max_iter == 10
        assert opts.tol_grad == SolverOptions().tol_grad


class TestInitialPair:
    def test_seeded(self, disk):
        first = initial_pair(disk, SolverOptions(seed=5))
        second = initial_pair(disk, SolverOptions(seed=5))
        np.testing.assert_array_equal(first.u, second.u)
        np.testing.assert_array_equal(first.v, second.v)
        assert np.all(first.u[disk.boundary_mask] == 0)
        assert np.all(first.v[disk.outside_mask] == 0)

    def test_warm_start_shape_is_checked(self, disk):
        warm = FieldPair(u=np.zeros((3, 3)), v=np.zeros((3, 3)))
        with pytest.raises(ValidationError):
            initial_pair(disk, SolverOptions(warm_start=warm))


class TestSolveFirstEigenpair:
    def test_unsupported_exponents(self, square):
        with pytest.raises(UnsupportedExponentsError):
            solve_first_eigenpair(square, Exponents.from_pqa(2.0, 2.0, 1.5))

    def test_result_is_admissible(self, disk, quartic, quick):
        res = solve_first_eigenpair(disk, quartic, quick)
        res.fields.check(disk)
        assert _non_increasing(res.quotient_history)
        assert res.eigenvalue == res.quotient_history[-1]
        assert coupling(res.fields, quartic, disk) == pytest.approx(1.0, rel=1e-8)
        assert res.constraint_residual <= quick.tol_constraint
        assert res.lambda_root_p == pytest.approx(res.eigenvalue ** (1 / 4), rel=1e-10)
        assert res.cold_start

    def test_v_orientation(self, disk, quartic, quick):
        res = solve_first_eigenpair(disk, quartic, quick)
        assert res.fields.v[disk.nearest_node(0.5, 0.0)] >= 0

    def test_same_seed_same_result(self, square, quartic):
        opts = SolverOptionsFactory(max_iter=15, seed=11, stall_tol=1e-1)
        first = solve_first_eigenpair(square, quartic, opts)
        second = solve_first_eigenpair(square, quartic, opts)
        assert first.quotient_history == second.quotient_history
        np.testing.assert_array_equal(first.fields.v, second.fields.v)

    def test_residual_matches_solver_report(self, disk, quartic, quick):
        res = solve_first_eigenpair(disk, quartic, quick)
        r_u, r_v = euler_lagrange_residual(res, quartic, disk)
        assert r_u == pytest.approx(res.el_residual_u, rel=1e-8, abs=1e-14)
        assert r_v == pytest.approx(res.el_residual_v, rel=1e-8, abs=1e-14)

    def test_warm_start_does_not_increase_quotient(self, disk, quartic, quick):
        res = solve_first_eigenpair(disk, quartic, quick)
        warm = solve_first_eigenpair(disk, quartic, quick.evolve(warm_start=res.fields))
        assert not warm.cold_start
        assert warm.eigenvalue <= res.eigenvalue * (1 + 1e-10)

    def test_stagnation_is_reported(self, disk, quartic, monkeypatch):
        # A quotient that never decreases exhausts every line search
        monkeypatch.setattr(
            'apps.eigensolver.problems.CoupledProblem.log_quotient', lambda self, fields: 0.0
        )
        opts = SolverOptions(max_iter=5, max_backtracks=2, stall_tol=1e-12)
        with pytest.raises(StagnationError) as excinfo:
            solve_first_eigenpair(disk, quartic, opts)
        assert excinfo.value.diagnostics['backtracks'] == 2

    def test_cone_pair_bounds_the_eigenvalue_from_above(self, half_spec, quick):
        dom = DiskGridFactory(n=17)
        e = half_spec.exponents(4.0)
        res = solve_first_eigenpair(dom, e, quick)
        trial = project_pair(cone_plane_pair(half_spec, dom), e, dom)
        assert rayleigh_quotient(trial, e, dom) >= res.eigenvalue - 1e-6

    def test_cone_pair_bounds_the_eigenvalue_at_large_exponents(self, half_spec):
        dom = DiskGridFactory(n=17)
        e = half_spec.exponents(32.0)
        trial = project_pair(cone_plane_pair(half_spec, dom), e, dom)
        opts = SolverOptions(max_iter=10, stall_tol=1e3, warm_start=trial)
        res = solve_first_eigenpair(dom, e, opts)
        assert res.eigenvalue <= rayleigh_quotient(trial, e, dom) * (1 + 1e-9)

    def test_seed_zero_constraint_residual_is_finite(self, quartic):
        dom = DiskGridFactory(n=17)
        opts = SolverOptionsFactory(max_iter=200, seed=0, stall_tol=1e-1)
        res = solve_first_eigenpair(dom, quartic, opts)
        assert math.isfinite(res.constraint_residual)
        assert res.constraint_residual <= opts.tol_constraint

    def test_constant_test_enters_the_v_residual(self, disk, quartic, quick):
        res = solve_first_eigenpair(disk, quartic, quick)
        shifted = res.fields.with_fields(v=res.fields.v + np.where(disk.domain_mask, 0.1, 0.0))
        term = constant_mode_term(shifted, res.eigenvalue, quartic, disk)
        _, r_v = euler_lagrange_residual(
            SimpleNamespace(fields=shifted, eigenvalue=res.eigenvalue), quartic, disk
        )
        area = disk.node_weights[disk.active_mask].sum()
        assert term != 0
        assert r_v >= abs(term) / (res.eigenvalue * math.sqrt(area)) * (1 - 1e-12)


class TestConvergenceGate:
    def test_unmet_constraint_blocks_convergence(self, disk, quartic, monkeypatch):
        problem = CoupledProblem(disk, quartic)
        start = initial_pair(disk, SolverOptions())
        fields = {'u': start.u, 'v': start.v}
        opts = SolverOptions(tol_grad=1e3)
        assert ProjectedDescent(problem, opts).run(fields).converged

        monkeypatch.setattr('apps.eigensolver.problems.constraint_value', lambda fp, e, dom: 1e-3)
        outcome = ProjectedDescent(problem, opts).run(fields)
        assert not outcome.converged
        assert outcome.iterations == 0

    def test_default_stall_threshold_follows_tol_grad(self):
        assert SolverOptions(tol_grad=1e-5).stall_threshold == pytest.approx(1e-4)
        assert SolverOptions(stall_tol=0.5).stall_threshold == 0.5


class TestConstantModeTerm:
    def test_equals_constraint_term(self, square, rng):
        for alpha, q in [(2.0, 4.0), (1.0, 3.0), (3.0, 6.0)]:
            e = Exponents.from_pqa(4.0, q, alpha)
            u = np.where(square.interior_mask, rng.uniform(0.1, 1.0, square.shape), 0.0)
            fp = FieldPair(u=u, v=rng.uniform(-0.2, 0.2, square.shape))
            lam = 2.5
            expected = -lam * e.beta * constraint_value(fp, e, square)
            assert constant_mode_term(fp, lam, e, square) == pytest.approx(
                expected, rel=1e-8, abs=1e-10
            )


class TestSystemReductions:
    def test_values(self):
        reductions = system_reductions(8.0, 2.0, 27.0, 3.0)
        assert reductions['lambda_p_0'] == 4.0
        assert reductions['lambda_0_q'] == 9.0
        assert reductions['dirichlet_root'] == pytest.approx(math.sqrt(8.0))
        assert reductions['neumann_root'] == pytest.approx(3.0)

    def test_exponent_must_exceed_one(self):
        with pytest.raises(ValidationError):
            system_reductions(1.0, 1.0, 1.0, 2.0)


class TestScalarNeumann:
    def test_balance_after_projection(self, square, quick):
        res = solve_scalar_neumann(square, 3.0, quick)
        assert res.constraint_residual <= 1e-8
        assert _non_increasing(res.quotient_history)
        assert res.values[square.nearest_node(0.5, 0.0)] >= 0


@pytest.mark.slow
class TestCalibration:
    """Grid calibration against separable and Bessel eigenvalues."""

    def test_square_dirichlet(self):
        dom = RectangleGridFactory(nx=65, ny=65)
        value = scalar_dirichlet_eig(dom, 2.0, SolverOptions(max_iter=500))
        assert value == pytest.approx(math.pi**2 / 2, rel=0.02)

    def test_square_neumann(self):
        dom = RectangleGridFactory(nx=65, ny=65)
        value = scalar_neumann_eig(dom, 2.0, SolverOptions(max_iter=500))
        assert value == pytest.approx(math.pi**2 / 4, rel=0.02)

    def test_disk_dirichlet(self):
        # The staircase boundary of the masked disk costs O(h)
        dom = DiskGridFactory(n=129)
        value = scalar_dirichlet_eig(dom, 2.0, SolverOptions(max_iter=500))
        assert value == pytest.approx(jn_zeros(0, 1)[0] ** 2, rel=0.03)

    def test_seed_robustness(self):
        dom = DiskGridFactory(n=33)
        e = Exponents.from_pqa(3.0, 3.0, 1.5)
        values = [
            solve_first_eigenpair(dom, e, SolverOptions(seed=seed)).eigenvalue for seed in range(5)
        ]
        assert max(values) == pytest.approx(min(values), rel=1e-3)

    def test_self_convergence(self):
        # beta must exceed 1, so the quadratic pair is replaced by p = q = 3, alpha = beta = 3/2
        e = Exponents.from_pqa(3.0, 3.0, 1.5)
        values = {
            n: solve_first_eigenpair(DiskGridFactory(n=n), e, SolverOptions()).eigenvalue
            for n in (33, 65, 129)
        }
        reference = (4 * values[129] - values[65]) / 3
        assert values[33] == pytest.approx(reference, rel=0.05)

    def test_converged_pair(self):
        dom = DiskGridFactory(n=33)
        e = Exponents.from_pqa(4.0, 4.0, 2.0)
        opts = SolverOptions(max_iter=2000, tol_grad=1e-6)
        res = solve_first_eigenpair(dom, e, opts)
        assert res.converged
        assert res.el_residual_u <= 10 * opts.tol_grad
        assert res.el_residual_v <= 10 * opts.tol_grad
        assert res.balance_defect <= 1e-6
        folded = res.fields.with_fields(u=np.abs(res.fields.u))
        assert rayleigh_quotient(folded, e, dom) <= res.eigenvalue * (1 + 1e-10)

    def test_scalar_infinity_limits(self):
        # (p lambda)^(1/p) tends to 1 / R on the unit disk for both boundary conditions
        dom = DiskGridFactory(n=65)
        opts = SolverOptions(max_iter=400)
        solvers = {'dirichlet': scalar_dirichlet_eig, 'neumann': scalar_neumann_eig}
        gaps = {}
        for p in (16.0, 64.0):
            for kind, solve in solvers.items():
                value = solve(dom, p, opts)
                gaps[kind, p] = abs(math.exp(math.log(p * value) / p) - 1.0)
        for kind in ('dirichlet', 'neumann'):
            assert gaps[kind, 64.0] < gaps[kind, 16.0]
            assert gaps[kind, 64.0] <= 0.15
            assert gaps[kind, 16.0] <= 0.35
