import numpy as np
import pytest

from mdh.kde1d import ProjectedKde, d_integral_db, d_integral_dpoints, \
    density_integral, find_local_extrema, grid_evaluate, lipschitz_bound

SQRT_2PI = np.sqrt(2 * np.pi)


class TestDensityIntegral:
    def test_single_kernel_peak(self):
        kde = ProjectedKde([0.0], 1.0)
        assert density_integral(kde, 0.0) == pytest.approx(1 / SQRT_2PI,
                                                           rel=1e-12)

    def test_two_kernels_midpoint(self):
        kde = ProjectedKde([-1.0, 1.0], 1.0)
        expected = np.exp(-0.5) / SQRT_2PI
        assert density_integral(kde, 0.0) == pytest.approx(expected,
                                                           rel=1e-12)

    def test_tail_decay(self):
        kde = ProjectedKde([0.0], 1.0)
        far = density_integral(kde, 10.0)
        assert far == pytest.approx(7.69e-23, rel=1e-2)
        assert density_integral(kde, 20.0) < far

    def test_deep_underflow_is_silent_zero(self):
        kde = ProjectedKde([0.0], 0.1)
        assert density_integral(kde, 50.0) == 0.0

    def test_scale_equivariance(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=12)
        s = 3.7
        a = density_integral(ProjectedKde(pts, 0.5), 0.3)
        b = density_integral(ProjectedKde(pts * s, 0.5 * s), 0.3 * s)
        assert b == pytest.approx(a / s, rel=1e-12)


class TestDerivatives:
    def test_zero_at_mode(self):
        assert d_integral_db(ProjectedKde([0.0], 1.0), 0.0) == 0.0

    def test_extremal_slope(self):
        val = d_integral_db(ProjectedKde([0.0], 1.0), 1.0)
        assert val == pytest.approx(-np.exp(-0.5) / SQRT_2PI, rel=1e-12)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        kde = ProjectedKde(rng.normal(size=15), 0.6)
        for b in rng.uniform(-2, 2, size=10):
            step = 1e-6 * kde.h
            fd = (density_integral(kde, b + step)
                  - density_integral(kde, b - step)) / (2 * step)
            assert d_integral_db(kde, b) == pytest.approx(fd, rel=1e-6)

    def test_dpoints_single(self):
        np.testing.assert_allclose(
            d_integral_dpoints(ProjectedKde([0.0], 1.0), 0.0), [0.0])

    def test_dpoints_two_kernels(self):
        kde = ProjectedKde([-1.0, 1.0], 1.0)
        g = d_integral_dpoints(kde, 0.0)
        expected = np.exp(-0.5) / (2 * SQRT_2PI)
        np.testing.assert_allclose(g, [expected, -expected], rtol=1e-12)

    def test_dpoints_sum_identity(self):
        rng = np.random.default_rng(2)
        kde = ProjectedKde(rng.normal(size=20), 0.4)
        for b in (-1.0, 0.2, 2.5):
            total = d_integral_dpoints(kde, b).sum()
            assert total == pytest.approx(-d_integral_db(kde, b), abs=1e-12)


class TestLipschitzBound:
    def test_h1(self):
        assert lipschitz_bound(1.0) == pytest.approx(
            np.exp(-0.5) / SQRT_2PI, rel=1e-12)
        assert lipschitz_bound(1.0) == pytest.approx(0.2419707, abs=5e-8)

    def test_h2(self):
        assert lipschitz_bound(2.0) == pytest.approx(
            lipschitz_bound(1.0) / 4.0, rel=1e-12)
        assert lipschitz_bound(2.0) == pytest.approx(0.0604927, abs=5e-8)

    def test_bounds_derivative_on_random_instances(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            h = rng.uniform(0.1, 2.0)
            kde = ProjectedKde(rng.normal(size=rng.integers(2, 30)) * 2, h)
            bs = rng.uniform(-5, 5, size=50)
            assert np.max(np.abs(d_integral_db(kde, bs))) \
                <= lipschitz_bound(h) * (1 + 1e-12)


class TestGridEvaluate:
    def test_endpoints(self):
        kde = ProjectedKde([0.0, 1.0], 0.5)
        vals = grid_evaluate(kde, -1.0, 2.0, 2)
        np.testing.assert_allclose(
            vals, [density_integral(kde, -1.0), density_integral(kde, 2.0)])

    def test_symmetry(self):
        kde = ProjectedKde([-1.0, 1.0], 0.7)
        vals = grid_evaluate(kde, -2.0, 2.0, 5)
        np.testing.assert_allclose(vals, vals[::-1], rtol=1e-12)

    def test_binned_close_to_direct(self):
        rng = np.random.default_rng(4)
        pts = np.concatenate([rng.normal(-2, 1, 250), rng.normal(2, 1, 250)])
        kde = ProjectedKde(pts, 0.5)
        direct = grid_evaluate(kde, -5, 5, 200)
        binned = grid_evaluate(kde, -5, 5, 200, binned=True)
        # error relative to the curve scale; the far tails are negligible
        assert np.abs(binned - direct).max() / direct.max() < 2e-3
        core = direct > 0.1 * direct.max()
        rel = np.abs(binned - direct)[core] / direct[core]
        assert rel.max() < 1e-2


class TestFindLocalExtrema:
    def dense_oracle(self, kde, lo, hi):
        xs = np.linspace(lo, hi, 100_000)
        ys = density_integral(kde, xs)
        out = []
        for i in range(1, len(xs) - 1):
            if ys[i] > ys[i - 1] and ys[i] >= ys[i + 1]:
                out.append((xs[i], "max"))
            elif ys[i] < ys[i - 1] and ys[i] <= ys[i + 1]:
                out.append((xs[i], "min"))
        return out

    def test_unimodal(self):
        kde = ProjectedKde([0.0], 1.0)
        ext = find_local_extrema(kde, -5, 5, 64)
        assert len(ext) == 1
        loc, _, kind = ext[0]
        assert kind == "max" and abs(loc) < 1e-7

    def test_bimodal_matches_dense_oracle(self):
        kde = ProjectedKde([-2.0, 2.0], 0.5)
        ext = find_local_extrema(kde, -4, 4, 128)
        oracle = self.dense_oracle(kde, -4, 4)
        assert [k for _, _, k in ext] == [k for _, k in oracle] \
            == ["max", "min", "max"]
        for (loc, _, _), (ref, _) in zip(ext, oracle):
            assert loc == pytest.approx(ref, abs=1e-4)
        assert abs(ext[1][0]) < 1e-7

    def test_oversmoothed_single_mode(self):
        kde = ProjectedKde([-2.0, 2.0], 10.0)
        ext = find_local_extrema(kde, -6, 6, 128)
        assert [k for _, _, k in ext] == ["max"]
        assert abs(ext[0][0]) < 1e-6

    def test_kinds_alternate(self):
        rng = np.random.default_rng(5)
        pts = np.concatenate([rng.normal(-3, 0.5, 10),
                              rng.normal(0, 0.5, 10),
                              rng.normal(3, 0.5, 10)])
        kde = ProjectedKde(pts, 0.3)
        kinds = [k for _, _, k in find_local_extrema(kde, -5, 5, 256)]
        for a, b in zip(kinds, kinds[1:]):
            assert a != b
