import math
from fractions import Fraction

import numpy as np
import pytest

from khintype.counting import CountQuery, enumerate_points
from khintype.expsum import (MajorantParams, OutOfRegimeError, compare_sweep,
                             dirichlet_sum, fejer_sum, kernel_check, majorant,
                             nearest_int_dist, nearest_int_dist_exact, product_integral)
from khintype.manifold import ManifoldSpec, Rectangle, builtin, parse_map


def zero_map(d, m):
    return ManifoldSpec("zero", Rectangle.unit(d),
                        parse_map("; ".join(["0"] * m), d, m))


class TestKernels:
    def test_h1_at_zero(self):
        assert fejer_sum(1, [0.0])[0] == pytest.approx(1.0)
        assert dirichlet_sum(1, [0.0])[0] == pytest.approx(3.0)
        rep = kernel_check(1, [0.0])
        assert rep.worst_fejer_slack == pytest.approx(1.0 - (2 / math.pi) ** 2)
        assert rep.worst_dirichlet_slack == pytest.approx(0.0, abs=1e-12)

    def test_indicator_boundary(self):
        # ||x|| = 1/8 = 1/(2H) for H = 4: (sin(pi/2)/sin(pi/8))^2 >= (8/pi)^2
        val = fejer_sum(4, [0.125])[0]
        assert val == pytest.approx(1.0 / math.sin(math.pi / 8) ** 2)
        assert val >= (8 / math.pi) ** 2

    def test_half_integer_dirichlet(self):
        for H in (1, 5, 32):
            rep = kernel_check(H, [0.5])
            assert rep.worst_dirichlet_slack >= -1e-9
            assert abs(dirichlet_sum(H, [0.5])[0]) == pytest.approx(1.0)

    def test_grid_slacks(self):
        xs = np.arange(10**4) / 10**4
        for H in (1, 7, 33, 64):
            rep = kernel_check(H, xs)
            assert rep.ok

    def test_h_validated(self):
        with pytest.raises(ValueError):
            kernel_check(0, [0.1])


class TestNearestIntDist:
    def test_matches_exact_on_rationals(self):
        for num in range(-12, 13):
            x = Fraction(num, 8)
            assert nearest_int_dist(float(x)) == pytest.approx(
                float(nearest_int_dist_exact(x)), abs=1e-15)

    def test_half_is_half(self):
        assert nearest_int_dist(0.5) == 0.5
        assert nearest_int_dist_exact(Fraction(1, 2)) == Fraction(1, 2)


class TestProductIntegral:
    def test_h_zero_gives_volume(self):
        spec = builtin("tracefree2")
        assert product_integral(spec, [0, 0], r=5) == float(spec.rect.volume())

    def test_zero_map_capped_at_one(self):
        spec = zero_map(2, 2)
        assert product_integral(spec, [3, -1], r=7) == pytest.approx(1.0)

    def test_parabola_reference_quadrature(self):
        # integrand min(1, 1/(10 ||2 alpha||)) on [0, 1]; 1e6-point midpoint reference
        xs = (np.arange(10**6) + 0.5) / 10**6
        ref = float(np.mean(np.minimum(1.0, 1.0 / (10 * np.abs(2 * xs - np.round(2 * xs))))))
        val = product_integral(builtin("parabola"), [1], r=10, grid=64)
        assert val == pytest.approx(ref, rel=0.01)

    def test_grid_doubling_stable(self):
        spec = builtin("tracefree2")
        for h in ([1, 0], [2, 1]):
            v1 = product_integral(spec, h, r=4, grid=32)
            v2 = product_integral(spec, h, r=4, grid=64)
            assert abs(v1 - v2) <= 0.05 * max(v1, v2)

    def test_validates_inputs(self):
        with pytest.raises(ValueError):
            product_integral(builtin("parabola"), [1], r=0)
        with pytest.raises(ValueError):
            product_integral(builtin("parabola"), [1], r=2, grid=4)


class TestMajorant:
    def test_kappa_half_out_of_regime(self):
        with pytest.raises(OutOfRegimeError, match="H=0"):
            majorant(builtin("parabola"), 100, Fraction(1, 2), 0.5)

    def test_parameter_arithmetic(self):
        p = MajorantParams.from_query(400, Fraction(1, 8), 0.01)
        assert (p.H, p.r) == (2, 0) and not p.in_regime
        p = MajorantParams.from_query(400, Fraction(1, 8), 1.0)
        assert (p.H, p.r) == (2, 7) and p.in_regime
        with pytest.raises(OutOfRegimeError):
            majorant(builtin("parabola"), 400, Fraction(1, 8), 0.01)
        assert math.isfinite(majorant(builtin("parabola"), 400, Fraction(1, 8), 1.0))

    def test_zero_map_closed_form(self):
        # every integral equals vol(K): majorant = q^d (2H+1)^m / H^m
        spec = zero_map(2, 2)
        p = MajorantParams.from_query(100, Fraction(1, 8), 1.0)
        val = majorant(spec, 100, Fraction(1, 8), 1.0, grid=16)
        assert val == pytest.approx(100.0**2 * (2 * p.H + 1) ** 2 / p.H**2)

    def test_grid_doubling_within_5pct(self):
        spec = builtin("tracefree2")
        v1 = majorant(spec, 512, Fraction(1, 4), 0.1, grid=32)
        v2 = majorant(spec, 512, Fraction(1, 4), 0.1, grid=64)
        assert abs(v1 - v2) <= 0.05 * max(v1, v2)

    def test_theta_independent_definition(self):
        # counts move with theta; the majorant cannot (it has no theta input)
        spec = builtin("tracefree2")
        maj = majorant(spec, 512, Fraction(1, 4), 0.1, grid=32)
        counts = set()
        for theta in ((0, 0, 0, 0), (Fraction(1, 3), 0, Fraction(1, 7), 0),
                      (Fraction(1, 2), Fraction(1, 5), 0, Fraction(2, 3))):
            q = CountQuery(512, Fraction(1, 4), theta[:2], theta[2:])
            counts.add(enumerate_points(spec, q, keep_points=False).count)
            assert majorant(spec, 512, Fraction(1, 4), 0.1, grid=32) == maj
        assert len(counts) > 1


class TestCompareSweep:
    def test_rows_and_skips(self):
        spec = builtin("tracefree2")
        queries = [CountQuery.zero_theta(q, Fraction(1, 4), 2, 2) for q in (64, 512)]
        with pytest.warns(UserWarning, match="out-of-regime"):
            table = compare_sweep(spec, queries, delta=0.01, grid=16)
        assert len(table.rows) == 1 and len(table.skipped) == 1
        assert table.rows[0].q == 512
        assert 0 < table.rows[0].ratio < 1

    def test_empty_count_ratio_zero(self):
        # zero map with a half-integer image shift: |b + 1/2| >= 1/2 > kappa
        spec = zero_map(2, 2)
        q = CountQuery(512, Fraction(1, 16), (Fraction(0), Fraction(0)),
                       (Fraction(1, 2), Fraction(1, 2)))
        table = compare_sweep(spec, [q], delta=1.0, grid=16)
        assert table.rows and table.rows[0].count == 0 and table.rows[0].ratio == 0.0
