"""
Tests for the strong-form residual operators and region tagging.
"""
import math

import numpy as np
import pytest

from apps.calculus import Exponents
from apps.core.exceptions import ValidationError
from apps.limits import LimitSpec, ansatz_singular_set, cone_plane_pair
from apps.viscosity import (
    RegionTag,
    SingularSet,
    f_infinity_residual,
    f_q_residual,
    h_infinity_residual,
    h_p_residual,
    region_tags,
)
from tests.factories import DiskGridFactory


@pytest.fixture
def cone_pair(half_spec):
    dom = DiskGridFactory(n=65)
    return dom, cone_plane_pair(half_spec, dom)


class TestRegionTags:
    def test_partition(self, disk):
        tags, radius = region_tags(disk.X, disk)
        assert radius == pytest.approx(3 * disk.h)
        assert np.all(tags[disk.outside_mask] == RegionTag.OUTSIDE)
        assert np.all(tags[disk.boundary_mask] == RegionTag.BOUNDARY)
        deep = disk.deep_interior_mask
        assert np.all(np.isin(tags[deep], [RegionTag.V_POS, RegionTag.V_NEG, RegionTag.V_ZERO]))
        assert np.all(tags[disk.interior_mask & ~deep] == RegionTag.EXCLUDED)

    def test_sign_bands(self, disk):
        tags, _ = region_tags(disk.X, disk)
        band = 2 * disk.h
        deep = disk.deep_interior_mask
        assert np.all(tags[deep & (disk.X > band + 1e-12)] == RegionTag.V_POS)
        assert np.all(tags[deep & (disk.X < -band - 1e-12)] == RegionTag.V_NEG)
        assert np.all(tags[deep & (np.abs(disk.X) <= band - 1e-12)] == RegionTag.V_ZERO)

    def test_flat_v_is_zero_region(self, disk):
        tags, _ = region_tags(np.zeros(disk.shape), disk)
        assert np.all(tags[disk.deep_interior_mask] == RegionTag.V_ZERO)

    def test_singular_set_is_excluded(self, disk):
        singular = SingularSet(points=((0.0, 0.0),))
        tags, _ = region_tags(disk.X, disk, singular, excluded_radius=0.3)
        near = np.hypot(disk.X, disk.Y) <= 0.3
        assert np.all(tags[disk.interior_mask & near] == RegionTag.EXCLUDED)


class TestInfinityOperators:
    def test_zero_u(self, disk, half_spec):
        report = h_infinity_residual(np.zeros(disk.shape), disk.X, 2.0, half_spec, disk)
        assert report.sup_defect == 0.0
        assert report.boundary_defect == 0.0

    def test_affine_u_without_source(self, disk, half_spec):
        u = np.where(disk.interior_mask, 0.3 * disk.X + 1.0, 0.0)
        report = h_infinity_residual(u, disk.X, 0.0, half_spec, disk)
        assert report.sup_defect == pytest.approx(0.0, abs=1e-10)

    def test_zero_v(self, disk, half_spec):
        report = f_infinity_residual(np.zeros(disk.shape), disk.X, 2.0, half_spec, disk)
        assert report.sup_defect == 0.0
        assert report.region_counts()['v_zero'] == int(disk.deep_interior_mask.sum())

    def test_negative_lambda(self, disk, half_spec):
        with pytest.raises(ValidationError):
            h_infinity_residual(np.zeros(disk.shape), disk.X, -1.0, half_spec, disk)

    def test_sign_flip_of_v(self, disk, half_spec):
        u = np.where(disk.interior_mask, 1 - np.hypot(disk.X, disk.Y), 0.0)
        v = disk.X + 0.3 * disk.Y**2
        first = f_infinity_residual(v, u, 2.0, half_spec, disk)
        second = f_infinity_residual(-v, u, 2.0, half_spec, disk)
        np.testing.assert_allclose(second.residual_field, -first.residual_field, rtol=1e-12)
        assert second.sup_defect == pytest.approx(first.sup_defect, rel=1e-12)

    def test_mirror_symmetry(self, cone_pair, half_spec):
        dom, pair = cone_pair
        report = h_infinity_residual(pair.u, pair.v, 2.0, half_spec, dom)
        field = report.residual_field
        np.testing.assert_allclose(field, np.flip(field, axis=0), atol=1e-9)

    def test_plane_solves_its_equation(self, cone_pair, half_spec):
        dom, pair = cone_pair
        singular = ansatz_singular_set(half_spec)
        report = f_infinity_residual(pair.v, pair.u, 2.0, half_spec, dom, singular)
        assert report.sup_defect <= 1e-8
        assert report.boundary_defect > 0
        assert report.summary()['operator'] == 'f_infinity'

    def test_cone_residual_shrinks_under_refinement(self, half_spec):
        coarse = DiskGridFactory(n=65)
        radius = 3 * coarse.h
        singular = ansatz_singular_set(half_spec)
        defects = []
        for dom in (coarse, DiskGridFactory(n=129)):
            pair = cone_plane_pair(half_spec, dom)
            report = h_infinity_residual(pair.u, pair.v, 2.0, half_spec, dom, singular, radius)
            assert report.excluded_radius == radius
            defects.append(report.sup_defect)
        assert defects[0] > 0
        assert defects[1] <= 0.65 * defects[0]


class TestPowerOperators:
    def test_affine_u_without_source(self, square):
        u = square.X + 0.5 * square.Y
        for p in (3.0, 6.0):
            e = Exponents.from_pqa(p, 4.0, 1.0)
            report = h_p_residual(u, square.X, 0.0, e, square)
            assert report.sup_defect == 0.0
            assert report.extras == {'exponent': p}

    def test_affine_v_without_source(self, square):
        e = Exponents.from_pqa(4.0, 4.0, 2.0)
        report = f_q_residual(square.X, np.zeros(square.shape), 0.0, e, square)
        assert report.sup_defect == 0.0
        assert report.boundary_defect > 0

    def test_critical_points_are_undefined_below_four(self, square):
        e = Exponents.from_pqa(3.0, 4.0, 1.0)
        report = h_p_residual(np.zeros(square.shape), square.X, 1.0, e, square)
        assert np.all(np.isnan(report.residual_field[square.deep_interior_mask]))
        assert math.isnan(report.sup_defect)
        assert report.boundary_defect == 0.0

    def test_exponent_below_two(self, square):
        e = Exponents.from_pqa(1.5, 4.0, 0.5)
        with pytest.raises(ValidationError):
            h_p_residual(np.zeros(square.shape), square.X, 1.0, e, square)

    def test_large_exponents_stay_finite(self, cone_pair):
        dom, pair = cone_pair
        s = LimitSpec(gamma=0.5, Q=1.0, R=1.0)
        e = s.exponents(64.0)
        report = h_p_residual(pair.u, pair.v, 2.0**64, e, dom)
        assert np.isfinite(report.sup_defect)


class TestBoundaryOperator:
    def test_both_defects_are_reported(self, square, half_spec):
        u = 1.0 - square.X**2
        report = h_infinity_residual(u, square.X, 0.0, half_spec, square)
        edge = square.boundary_mask
        x = np.abs(square.X)
        expected = np.minimum(8.0 * x**2, 2.0 * x)
        np.testing.assert_allclose(
            report.boundary_operator_field[edge], expected[edge], atol=1e-9
        )
        assert np.all(np.isnan(report.boundary_operator_field[~edge]))
        assert report.boundary_operator_defect == pytest.approx(2.0, abs=1e-9)
        assert report.boundary_defect == pytest.approx(1.0)

    def test_smaller_defect_classifies_the_node(self, square, half_spec):
        u = 1.0 - square.X**2
        report = h_infinity_residual(u, square.X, 0.0, half_spec, square)
        # u = 0.75 beats the operator value 1 at (0.5, 1)
        assert report.residual_field[square.nearest_node(0.5, 1.0)] == pytest.approx(0.75)
        # the operator value 0.125 beats u = 63/64 at (0.125, 1)
        assert report.residual_field[square.nearest_node(0.125, 1.0)] == pytest.approx(
            0.125, abs=1e-9
        )
        assert report.boundary_min_defect < report.boundary_defect
        assert report.summary()['boundary_min_defect'] == report.boundary_min_defect
