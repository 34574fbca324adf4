"""Kernel evaluation, prefilter poles, coefficient round trips."""

import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import solveh_banded

from sirfield.splines import (BasisFunction, compute_coefficients, eval_basis,
                              kernel_integer_samples, prefilter_poles,
                              reconstruct)

ALL_KERNELS = [
    BasisFunction.nearest(),
    BasisFunction.linear(),
    BasisFunction.keys(),
    BasisFunction.bspline(2),
    BasisFunction.bspline(3),
    BasisFunction.bspline(4),
    BasisFunction.bspline(5),
    BasisFunction.omoms3(),
]


def one_sided_power_sum(n, x):
    """Independent evaluation of the one-sided power expansion."""
    total = 0.0
    for k in range(n + 2):
        coef = (-1.0) ** k * (n + 1) / (math.factorial(n + 1 - k) * math.factorial(k))
        arg = (n + 1) / 2.0 + x - k
        if arg > 0:
            total += coef * arg ** n
        elif arg == 0 and n == 0:
            total += coef * 0.5
    return total


class TestEvalBasis:
    def test_cubic_center(self):
        f = BasisFunction.bspline(3)
        assert eval_basis(f, 0.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert eval_basis(f, 0.0) == pytest.approx(one_sided_power_sum(3, 0.0), abs=1e-15)

    def test_cubic_outside_support(self):
        assert eval_basis(BasisFunction.bspline(3), 2.0) == 0.0
        assert eval_basis(BasisFunction.bspline(3), -2.5) == 0.0

    def test_linear_tent(self):
        assert eval_basis(BasisFunction.linear(), 0.25) == 0.75

    def test_nearest_edge_half(self):
        # one-sided power at n=0 assigns 1/2 on the jump
        assert eval_basis(BasisFunction.nearest(), 0.5) == 0.5
        assert eval_basis(BasisFunction.nearest(), -0.5) == 0.5
        assert eval_basis(BasisFunction.nearest(), 0.51) == 0.0

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5, 7])
    def test_bspline_matches_power_sum(self, n):
        f = BasisFunction.bspline(n)
        xs = np.linspace(-(n + 1) / 2 - 0.5, (n + 1) / 2 + 0.5, 301)
        expected = np.array([one_sided_power_sum(n, x) for x in xs])
        # the oracle's cancellation dust grows with the degree
        npt.assert_allclose(eval_basis(f, xs), expected, atol=5e-13 * 2 ** n)

    def test_omoms3_values(self):
        f = BasisFunction.omoms3()
        assert eval_basis(f, 0.0) == pytest.approx(13.0 / 21.0, abs=1e-14)
        assert eval_basis(f, 1.0) == pytest.approx(4.0 / 21.0, abs=1e-14)
        assert eval_basis(f, 2.0) == 0.0

    @pytest.mark.parametrize("f", ALL_KERNELS, ids=lambda f: f.name)
    def test_symmetry_exact(self, f):
        xs = np.linspace(0.0, f.support / 2 + 1.0, 500)
        npt.assert_array_equal(eval_basis(f, xs), eval_basis(f, -xs))

    @pytest.mark.parametrize("f", ALL_KERNELS, ids=lambda f: f.name)
    def test_partition_of_unity(self, f):
        xs = np.linspace(-f.support, f.support, 1001)
        half = int(math.ceil(f.support)) + 1
        total = np.zeros_like(xs)
        for k in range(-int(f.support) - half, int(f.support) + half + 1):
            total += eval_basis(f, xs - k)
        npt.assert_allclose(total, 1.0, atol=1e-12)

    @pytest.mark.parametrize("f", ALL_KERNELS, ids=lambda f: f.name)
    def test_support_is_hard_zero(self, f):
        xs = np.array([f.support / 2 + 1e-12, f.support, -f.support * 2])
        npt.assert_array_equal(eval_basis(f, xs), 0.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            BasisFunction("cosine")

    def test_support_and_interpolating_flags(self):
        assert BasisFunction.nearest().support == 1.0
        assert BasisFunction.linear().support == 2.0
        assert BasisFunction.keys().support == 4.0
        assert BasisFunction.omoms3().support == 4.0
        for n in range(8):
            assert BasisFunction.bspline(n).support == n + 1
        assert BasisFunction.bspline(1).interpolating
        assert not BasisFunction.bspline(2).interpolating
        assert not BasisFunction.omoms3().interpolating
        assert BasisFunction.keys().interpolating

    def test_from_name(self):
        assert BasisFunction.from_name("bspline5").degree == 5
        assert BasisFunction.from_name("O-MoMS3").kind == "omoms3"
        with pytest.raises(ValueError):
            BasisFunction.from_name("bspline")


class TestPrefilterPoles:
    def test_cubic_pole(self):
        pre = prefilter_poles(BasisFunction.bspline(3))
        assert pre.poles == pytest.approx((math.sqrt(3.0) - 2.0,), abs=1e-14)
        assert pre.gain == pytest.approx(6.0, rel=1e-12)

    def test_interpolating_kernels_trivial(self):
        for f in (BasisFunction.nearest(), BasisFunction.linear(),
                  BasisFunction.keys(), BasisFunction.bspline(1)):
            assert prefilter_poles(f).trivial

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
    def test_pole_count_and_magnitude(self, n):
        poles = prefilter_poles(BasisFunction.bspline(n)).poles
        assert len(poles) == n // 2
        assert all(abs(z) < 1.0 for z in poles)
        assert all(np.isreal(z) for z in poles)

    def test_quintic_poles_against_root_oracle(self):
        # roots inside the unit circle of the sample polynomial {1,26,66,26,1}/120
        roots = np.roots([1.0, 26.0, 66.0, 26.0, 1.0])
        expected = np.sort(roots[np.abs(roots) < 1].real)
        poles = np.array(prefilter_poles(BasisFunction.bspline(5)).poles)
        npt.assert_allclose(poles, expected, rtol=1e-12)

    def test_omoms3_pole(self):
        pole = prefilter_poles(BasisFunction.omoms3()).poles[0]
        assert pole == pytest.approx((math.sqrt(105.0) - 13.0) / 8.0, abs=1e-14)

    @pytest.mark.parametrize("f", ALL_KERNELS, ids=lambda f: f.name)
    def test_integer_samples_sum_to_one(self, f):
        assert kernel_integer_samples(f).sum() == pytest.approx(1.0, abs=1e-14)


def _banded_solve_oracle(samples, f):
    """Dense solve of the zero-extension interpolation system."""
    kern = kernel_integer_samples(f)
    m = kern.size // 2
    K = samples.size
    A = np.zeros((K, K))
    for i in range(K):
        for j in range(max(0, i - m), min(K, i + m + 1)):
            A[i, j] = kern[j - i + m]
    return np.linalg.solve(A, samples)


class TestComputeCoefficients:
    def test_zero_samples(self):
        out = compute_coefficients(np.zeros(17), BasisFunction.bspline(5))
        npt.assert_array_equal(out, 0.0)

    def test_interpolating_is_identity(self):
        v = np.random.default_rng(3).standard_normal(40)
        npt.assert_array_equal(compute_coefficients(v, BasisFunction.linear()), v)
        npt.assert_array_equal(compute_coefficients(v, BasisFunction.keys()), v)

    def test_impulse_cubic_alternates_and_reconstructs(self):
        K = 33
        v = np.zeros(K)
        v[K // 2] = 1.0
        f = BasisFunction.bspline(3)
        c = compute_coefficients(v, f)
        npt.assert_allclose(c, _banded_solve_oracle(v, f), atol=1e-13)
        mid = K // 2
        segment = c[mid: mid + 6]
        assert np.all(np.sign(segment) == [1, -1, 1, -1, 1, -1])
        assert np.all(np.abs(np.diff(np.abs(segment))) < np.abs(segment[:-1]))
        r = reconstruct(c, f, np.arange(K, dtype=float))
        npt.assert_allclose(r, v, atol=1e-10)

    @pytest.mark.parametrize("K", [1, 2, 8, 64, 301, 4096])
    @pytest.mark.parametrize("f", ALL_KERNELS, ids=lambda f: f.name)
    def test_round_trip_random(self, K, f):
        v = np.random.default_rng(K).standard_normal(K)
        c = compute_coefficients(v, f)
        r = reconstruct(c, f, np.arange(K, dtype=float))
        assert np.linalg.norm(r - v) <= 1e-10 * np.linalg.norm(v)

    @pytest.mark.parametrize("f", [BasisFunction.bspline(2), BasisFunction.bspline(3),
                                   BasisFunction.bspline(4), BasisFunction.bspline(5),
                                   BasisFunction.omoms3()], ids=lambda f: f.name)
    def test_recursions_match_banded_solver(self, f):
        v = np.random.default_rng(11).standard_normal(301)
        kern = kernel_integer_samples(f)
        m = kern.size // 2
        # scipy's upper banded form: row m-d holds diagonal offset d
        ab = np.zeros((m + 1, v.size))
        for off in range(m + 1):
            ab[m - off, off:] = kern[m + off]
        oracle = solveh_banded(ab, v, lower=False)
        mine = compute_coefficients(v, f)
        assert np.linalg.norm(mine - oracle) <= 1e-9 * np.linalg.norm(oracle)


class TestReconstruct:
    def test_sinusoid_round_trip_quintic(self):
        f = BasisFunction.bspline(5)
        k = np.arange(256, dtype=float)
        v = np.sin(2 * np.pi * 0.11 * k)  # below Nyquist
        c = compute_coefficients(v, f)
        npt.assert_allclose(reconstruct(c, f, k), v, atol=1e-10)

    def test_single_coefficient_nearest(self):
        assert reconstruct(np.array([1.0]), BasisFunction.nearest(), 0.4) == 1.0

    def test_single_coefficient_cubic_offset(self):
        val = reconstruct(np.array([1.0]), BasisFunction.bspline(3), 1.0)
        assert val == pytest.approx(1.0 / 6.0, abs=1e-14)

    def test_zero_outside_extent(self):
        c = np.ones(4)
        assert reconstruct(c, BasisFunction.bspline(3), 10.0) == 0.0
        assert reconstruct(c, BasisFunction.bspline(3), -10.0) == 0.0


APPROX_LEVELS = {
    # refinement exponents chosen so errors stay above the double-precision floor
    "nearest": (4, 5, 6, 7, 8),
    "linear": (4, 5, 6, 7, 8),
    "keys": (4, 5, 6, 7, 8),
    "bspline2": (4, 5, 6, 7, 8),
    "bspline3": (4, 5, 6, 7),
    "bspline4": (3, 4, 5, 6),
    "bspline5": (2, 3, 4, 5),
    "omoms3": (4, 5, 6, 7),
}


def _smooth_test_function(t):
    return np.exp(-0.5 * ((t - 20.0) / 6.0) ** 2) * np.sin(2 * np.pi * 0.35 * t)


@pytest.mark.parametrize("f", ALL_KERNELS, ids=lambda f: f.name)
def test_approximation_order(f):
    errs = []
    hs = []
    for lev in APPROX_LEVELS[f.name]:
        h = 2.0 ** -lev
        k = np.arange(int(40.0 / h) + 1, dtype=float)
        c = compute_coefficients(_smooth_test_function(k * h), f)
        xe = np.linspace(5.0, 35.0, 1777)
        vals = reconstruct(c, f, xe / h)
        errs.append(np.sqrt(np.mean((vals - _smooth_test_function(xe)) ** 2)))
        hs.append(h)
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope == pytest.approx(f.order, abs=0.25)
