"""Gauss-Legendre rules, point-count heuristic, patch sampling."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.special import roots_legendre

from sirfield.geometry import (decompose_to_bezier, make_cylindrical_shell,
                               make_rectangle, make_spherical_cap)
from sirfield.quadrature import (gauss_legendre, iso_curve_length, point_source,
                                 sample_patch, sample_surface,
                                 select_point_counts)

LAM = 291e-6
SPEED = 1540.0


class TestGaussLegendre:
    def test_one_point(self):
        rule = gauss_legendre(1)
        npt.assert_array_equal(rule.nodes, [0.0])
        npt.assert_array_equal(rule.weights, [2.0])

    def test_two_points(self):
        rule = gauss_legendre(2)
        npt.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)],
                            atol=1e-15)
        npt.assert_allclose(rule.weights, [1.0, 1.0], atol=1e-15)

    def test_odd_symmetric_integrand(self):
        rule = gauss_legendre(5)
        assert abs(np.sum(rule.weights * rule.nodes ** 9)) < 1e-14

    def test_zero_points_rejected(self):
        with pytest.raises(ValueError):
            gauss_legendre(0)

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 21, 34, 55, 64])
    def test_weight_sum_symmetry_exactness(self, n):
        rule = gauss_legendre(n)
        assert abs(rule.weights.sum() - 2.0) < 1e-13
        npt.assert_array_equal(rule.nodes, -rule.nodes[::-1])
        npt.assert_array_equal(rule.weights, rule.weights[::-1])
        for k in range(2 * n):
            exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
            assert abs(np.sum(rule.weights * rule.nodes ** k) - exact) < 1e-12

    @pytest.mark.parametrize("n", [5, 64, 243])
    def test_against_scipy_oracle(self, n):
        rule = gauss_legendre(n)
        nodes, weights = roots_legendre(n)
        npt.assert_allclose(rule.nodes, nodes, atol=1e-14)
        npt.assert_allclose(rule.weights, weights, atol=5e-14)


class TestPointCounts:
    @pytest.mark.parametrize("rate,target", [(30e6, (7, 59)), (80e6, (17, 155))])
    def test_rectangle_counts(self, rate, target):
        patch = decompose_to_bezier(make_rectangle(LAM, 10 * LAM))[0]
        counts = select_point_counts(patch, rate, SPEED)
        assert abs(counts[0] - target[0]) <= 2
        assert abs(counts[1] - target[1]) <= 2

    @pytest.mark.parametrize("rate,target", [(30e6, (59, 91)), (80e6, (155, 243))])
    def test_cap_counts(self, rate, target):
        cap = make_spherical_cap(20 * LAM, 48 * LAM)
        for patch in decompose_to_bezier(cap):
            counts = select_point_counts(patch, rate, SPEED)
            assert abs(counts[0] - target[0]) <= 2
            assert abs(counts[1] - target[1]) <= 2

    def test_invalid_inputs(self):
        patch = decompose_to_bezier(make_rectangle(1.0, 1.0))[0]
        with pytest.raises(ValueError):
            select_point_counts(patch, 0.0, SPEED)


class TestIsoCurveLength:
    def test_cylinder_arc_length_analytic(self):
        w, r = 2e-3, 3e-3
        shell = make_cylindrical_shell(w, 8e-3, r)
        measured = iso_curve_length(shell, "v", 0.5)
        analytic = 2.0 * r * math.asin(w / (2.0 * r))
        assert measured == pytest.approx(analytic, rel=1e-6)

    def test_rectangle_sides(self):
        rect = make_rectangle(2.0, 3.0)
        assert iso_curve_length(rect, "u", 0.5) == pytest.approx(2.0, rel=1e-12)
        assert iso_curve_length(rect, "v", 0.5) == pytest.approx(3.0, rel=1e-12)


class TestSamplePatch:
    def test_unit_rectangle_exact_area(self):
        patch = decompose_to_bezier(make_rectangle(1.0, 1.0))[0]
        rule = gauss_legendre(2)
        sampled = sample_patch(patch, rule, rule)
        assert abs(sampled.area - 1.0) < 1e-13
        assert sampled.n_points == 4
        npt.assert_array_equal(sampled.distribution, 1.0)

    def test_cap_area_at_heuristic_counts(self):
        D, R = 20 * LAM, 48 * LAM
        cap = make_spherical_cap(D, R)
        sampled = sample_surface(cap, 30e6, SPEED)
        analytic = 2 * math.pi * R * (R - math.sqrt(R * R - (D / 2) ** 2))
        assert abs(sampled.area - analytic) < 1e-9 * analytic

    def test_cylinder_area(self):
        w, h, r = LAM, 10 * LAM, 2.5 * LAM
        shell = make_cylindrical_shell(w, h, r)
        sampled = sample_surface(shell, 30e6, SPEED)
        analytic = 2.0 * r * math.asin(w / (2.0 * r)) * h
        assert abs(sampled.area - analytic) < 1e-9 * analytic

    def test_area_convergence_monotone(self):
        D, R = 20 * LAM, 48 * LAM
        patch = decompose_to_bezier(make_spherical_cap(D, R))[0]
        analytic = 2 * math.pi * R * (R - math.sqrt(R * R - (D / 2) ** 2)) / 4.0
        errors = []
        for n in (2, 4, 8, 16):
            rule = gauss_legendre(n)
            errors.append(abs(sample_patch(patch, rule, rule).area - analytic))
        for prev, nxt in zip(errors, errors[1:]):
            assert nxt <= prev or nxt < 1e-12 * analytic

    def test_deterministic_bit_identical(self):
        cap = make_spherical_cap(20 * LAM, 48 * LAM)
        patch = decompose_to_bezier(cap)[1]
        rule_u, rule_v = gauss_legendre(13), gauss_legendre(7)
        a = sample_patch(patch, rule_u, rule_v)
        b = sample_patch(patch, rule_u, rule_v)
        npt.assert_array_equal(a.points, b.points)
        npt.assert_array_equal(a.normals, b.normals)
        npt.assert_array_equal(a.combined_weights, b.combined_weights)

    def test_distribution_hook(self):
        patch = decompose_to_bezier(make_rectangle(1.0, 1.0))[0]
        rule = gauss_legendre(3)
        sampled = sample_patch(patch, rule, rule, distribution=lambda u, v: u + v)
        t = (rule.nodes + 1) / 2
        expected = (t[:, None] + t[None, :]).reshape(-1)
        npt.assert_allclose(sampled.distribution, expected, atol=1e-15)
        # weights are untouched by the distribution
        assert abs(sampled.area - 1.0) < 1e-13

    def test_jacobians_positive(self):
        cap = make_spherical_cap(20 * LAM, 48 * LAM)
        sampled = sample_surface(cap, 30e6, SPEED)
        assert np.all(sampled.combined_weights > 0.0)

    def test_csv_export(self, tmp_path):
        patch = decompose_to_bezier(make_rectangle(1.0, 2.0))[0]
        rule = gauss_legendre(2)
        sampled = sample_patch(patch, rule, rule)
        path = tmp_path / "points.csv"
        sampled.to_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "x,y,z,nx,ny,nz,weight"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (4, 7)
        npt.assert_allclose(data[:, 6].sum(), 2.0, atol=1e-13)


def test_point_source_surrogate():
    src = point_source([1.0, 2.0, 3.0], [0.0, 0.0, 2.0], 5e-6)
    assert src.n_points == 1
    npt.assert_array_equal(src.normals, [[0.0, 0.0, 1.0]])
    assert src.area == 5e-6
