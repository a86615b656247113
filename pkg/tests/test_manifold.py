from fractions import Fraction

import numpy as np
import pytest

from khintype.manifold import (ManifoldSpec, Rectangle, builtin, eval_all, lipschitz_c1,
                               max_abs_on_box, parse_map)
from khintype.polynomials import ParseError, Polynomial, parse_polynomial


class TestParser:
    def test_veronese_source(self):
        pm = parse_map("a1^2; a1*a2; a2^2", 5, 3)
        assert (pm.d, pm.m) == (5, 3)
        assert pm.components[1]((1, 2, 0, 0, 0)) == 2

    def test_zero_map(self):
        pm = parse_map("0", 1, 1)
        assert pm.components[0].is_zero()

    def test_tracefree_source(self):
        pm = parse_map("a1^2 - a2^2; a1*a2", 2, 2)
        assert pm.value((Fraction(2), Fraction(3))) == (Fraction(-5), Fraction(6))

    def test_rational_literal(self):
        p = parse_polynomial("3/4*a1 - 1/2", 1)
        assert p((Fraction(2),)) == Fraction(1)

    def test_round_trip(self):
        for src, d in [("a1^2 - a2^2", 2), ("3/4*a1*a2 + 2*a2^3 - 7", 2),
                       ("(a1 + a2)^3 - a1^3", 2), ("0", 3), ("5", 2)]:
            p = parse_polynomial(src, d)
            assert parse_polynomial(p.canonical(), d) == p

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as err:
            parse_polynomial("a1 + + ", 2)
        assert err.value.position == 7

    def test_unknown_variable(self):
        with pytest.raises(ParseError, match="unknown variable"):
            parse_polynomial("a3 + 1", 2)

    def test_negative_exponent(self):
        with pytest.raises(ParseError, match="negative exponent"):
            parse_polynomial("a1^-2", 1)

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            parse_polynomial("a1 @ 2", 1)

    def test_divide_by_polynomial_rejected(self):
        with pytest.raises(ParseError, match="constant"):
            parse_polynomial("1/a1", 1)

    def test_component_count(self):
        with pytest.raises(ParseError):
            parse_map("a1; a1", 1, 3)


class TestEvalAll:
    def test_tracefree_hessians_constant(self):
        spec = builtin("tracefree2")
        for alpha in [(Fraction(0), Fraction(0)), (Fraction(1, 3), Fraction(2, 3))]:
            _, _, pencil = eval_all(spec, alpha)
            assert np.array_equal(pencil.generators[0].mat, np.diag([2.0, -2.0]))
            assert np.array_equal(pencil.generators[1].mat, np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_zero_map(self):
        spec = ManifoldSpec("z", Rectangle.unit(2), parse_map("0; 0", 2, 2))
        v, J, H = eval_all(spec, (Fraction(1, 2), Fraction(1, 2)))
        assert v == (0, 0)
        assert all(x == 0 for row in J for x in row)
        assert np.all(H.stack == 0.0)

    def test_parabola_outside_rectangle_warns_but_evaluates(self):
        spec = builtin("parabola")
        with pytest.warns(UserWarning, match="outside"):
            v, J, H = eval_all(spec, (Fraction(3),))
        assert v == (9,)
        assert J == ((6,),)
        assert H.generators[0].mat[0, 0] == 2.0

    def test_exact_and_repeatable(self):
        spec = builtin("veronese5")
        alpha = tuple(Fraction(i + 1, 7) for i in range(5))
        first = eval_all(spec, alpha)
        second = eval_all(spec, alpha)
        assert first[0] == second[0] == (Fraction(1, 49), Fraction(2, 49), Fraction(4, 49))
        assert first[1] == second[1]

    def test_derivatives_match_finite_differences(self, rng):
        spec = builtin("tracefree2")
        h = 1e-5
        for _ in range(5):
            alpha = np.array([0.1, 0.1]) + 0.8 * rng.random(2)
            _, J, pencil = eval_all(spec, tuple(alpha))
            J = np.array(J, dtype=float)
            fd = np.zeros_like(J)
            for i in range(2):
                e = np.zeros(2)
                e[i] = h
                fp = np.array(spec.map.value(alpha + e), dtype=float)
                fm = np.array(spec.map.value(alpha - e), dtype=float)
                fd[:, i] = (fp - fm) / (2 * h)
            assert np.max(np.abs(J - fd)) <= 1e-8 * (1 + np.abs(J).max())
            # second derivatives by differencing the exact Jacobian
            for i in range(2):
                e = np.zeros(2)
                e[i] = h
                Jp = np.array(spec.map.jacobian(alpha + e), dtype=float)
                Jm = np.array(spec.map.jacobian(alpha - e), dtype=float)
                fd2 = (Jp - Jm) / (2 * h)
                for k in range(2):
                    col = pencil.stack[k, :, i]
                    assert np.max(np.abs(col - fd2[k])) <= 1e-8 * (1 + np.abs(col).max())


class TestBuiltins:
    def test_tracefree2_m(self):
        assert builtin("tracefree2").m == 2  # C(3,2) - 1

    def test_veronese5_dims(self):
        spec = builtin("veronese5")
        assert (spec.d, spec.m) == (5, 3)

    def test_tracefree4_m(self):
        assert builtin("tracefree(4)").m == 9  # C(5,2) - 1

    def test_parabola(self):
        spec = builtin("parabola")
        assert (spec.d, spec.m) == (1, 1)
        assert spec.map.value((Fraction(1, 2),)) == (Fraction(1, 4),)

    def test_unknown(self):
        with pytest.raises(ValueError):
            builtin("astroid")
        with pytest.raises(ValueError):
            builtin("tracefree(9)")


class TestRectangle:
    def test_requires_nondegenerate(self):
        with pytest.raises(ValueError):
            Rectangle((0, 0), (1, 0))

    def test_inflate_contains(self):
        r = Rectangle.unit(3)
        L = r.inflate()
        assert L.contains_rect(r)
        assert L.lo[0] == Fraction(-1, 10) and L.hi[0] == Fraction(11, 10)

    def test_contains_is_exact(self):
        r = Rectangle.unit(1)
        assert r.contains((Fraction(1),))
        assert not r.contains((Fraction(1_000_001, 1_000_000),))


class TestLipschitz:
    def test_zero_map(self):
        spec = ManifoldSpec("z", Rectangle.unit(2), parse_map("0; 0", 2, 2))
        assert lipschitz_c1(spec) == pytest.approx(1.0)

    def test_parabola_on_unit(self):
        # max |2 alpha| over [0,1] is 2, achieved at the endpoint
        c1 = lipschitz_c1(builtin("parabola"), L=Rectangle.unit(1))
        assert 3.0 <= c1 <= 3.0 * 1.01 + 1e-9

    def test_tracefree2_corner_max(self):
        # Jacobian entries are +-2a1, +-2a2, a1, a2: max entry 2 at a corner
        c1 = lipschitz_c1(builtin("tracefree2"), L=Rectangle.unit(2))
        assert 3.0 <= c1 <= 3.0 * 1.01 + 1e-9

    def test_upper_bound_certified(self, rng):
        # bound must dominate dense sampling, and stay within 1%
        p = parse_polynomial("a1^3 - 2*a1*a2 + a2^2 - 1/3", 2)
        ub = max_abs_on_box(p, (Fraction(-1), Fraction(-1)), (Fraction(1), Fraction(1)))
        grid = np.stack(np.meshgrid(np.linspace(-1, 1, 201), np.linspace(-1, 1, 201),
                                    indexing="ij"), axis=-1).reshape(-1, 2)
        dense = float(np.max(np.abs(p.eval_array(grid))))
        assert dense <= ub <= dense * 1.02

    def test_requires_containing_rectangle(self):
        spec = builtin("tracefree2")
        with pytest.raises(ValueError):
            lipschitz_c1(spec, L=Rectangle((0, 0), (Fraction(1, 2), 1)))
