import numpy as np
import pytest

from khintype.manifold import builtin
from khintype.nondegen import FAIL, PASS
from khintype.symspace import SymPencil, flatten_sym, middle_eigenvalue
from khintype.typicality import (DENSE_CONULL, EMPTY, NOT_DENSE, OperatorSample,
                                 annihilator_zero_search, construct, dim_S_check,
                                 find_zero_middle_eig, membership_U, membership_Utilde,
                                 phase_scan, predicted_U, predicted_Utilde,
                                 sample_operator)


class TestSampling:
    def test_deterministic(self):
        a = sample_operator(3, 2, 42)
        b = sample_operator(3, 2, 42)
        assert np.array_equal(a.pencil.stack, b.pencil.stack)
        assert a.distribution == "gaussian-upper"

    def test_different_seeds_differ(self):
        assert not np.array_equal(sample_operator(2, 1, 0).pencil.stack,
                                  sample_operator(2, 1, 1).pencil.stack)

    def test_entry_moments(self):
        # upper-triangle entries are iid standard normal: mean within 3/sqrt(N)
        entries = []
        for seed in range(200):
            s = sample_operator(3, 3, seed)
            iu = np.triu_indices(3)
            for g in s.pencil.generators:
                entries.extend(g.mat[iu])
        entries = np.asarray(entries)
        n = len(entries)
        assert n >= 10**3
        assert abs(entries.mean()) <= 3.0 / np.sqrt(n)
        assert abs(entries.var() - 1.0) <= 0.2

    def test_validates(self):
        with pytest.raises(ValueError):
            sample_operator(0, 1, 0)


class TestMembership:
    def test_tracefree_generators_in_U(self):
        assert membership_U(construct("tracefree-basis", 2), budget=2048) == PASS

    def test_veronese_not_in_U(self):
        pencil = builtin("veronese5").map.hessian_pencil([0.0] * 5)
        sample = OperatorSample(pencil, None, "catalog")
        assert membership_U(sample, budget=2048) == FAIL

    def test_single_identity_in_U(self):
        for d in (2, 3, 4):
            sample = OperatorSample(SymPencil([np.eye(d)]), None, "manual")
            assert membership_U(sample, budget=128) == PASS

    def test_identity3_in_Utilde(self):
        sample = OperatorSample(SymPencil([np.eye(3)]), None, "manual")
        assert membership_Utilde(sample, budget=128) == PASS

    def test_hyperbolic_not_in_Utilde(self):
        sample = OperatorSample(SymPencil([np.diag([1.0, -1.0])]), None, "manual")
        assert membership_Utilde(sample, budget=128) == FAIL

    def test_32_cell_always_fails_Utilde(self):
        for seed in range(10):
            assert membership_Utilde(sample_operator(3, 2, seed), budget=2048) == FAIL

    def test_dependent_generators_fail(self):
        sample = OperatorSample(SymPencil([np.eye(2), 2.0 * np.eye(2)]), None, "manual")
        assert membership_U(sample, budget=128) == FAIL


class TestConstructions:
    def test_diag_squares(self):
        s = construct("diag-squares", 3, 3)
        assert np.array_equal(s.pencil.stack,
                              np.stack([np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0]),
                                        np.diag([0, 0, 1.0])]))

    def test_shear(self):
        s = construct("shear", 3, 2)
        e13 = np.zeros((3, 3)); e13[0, 2] = e13[2, 0] = 1.0
        e23 = np.zeros((3, 3)); e23[1, 2] = e23[2, 1] = 1.0
        assert np.array_equal(s.pencil.stack, np.stack([e13, e23]))

    def test_tracefree_basis_matches_catalog_hessians(self):
        for d in (2, 3, 4):
            built = construct("tracefree-basis", d).pencil
            hess = builtin(f"tracefree({d})" if d != 2 else "tracefree2").map \
                .hessian_pencil([0.0] * d)
            assert np.array_equal(built.stack, hess.stack)

    def test_posdef_pad(self):
        s = construct("posdef-pad", 4, 3)
        assert np.array_equal(s.pencil.generators[0].mat, np.eye(4))
        assert np.all(s.pencil.stack[1:] == 0.0)

    def test_dimension_constraints(self):
        with pytest.raises(ValueError):
            construct("shear", 3, 3)
        with pytest.raises(ValueError):
            construct("diag-squares", 3, 2)
        with pytest.raises(ValueError):
            construct("nope", 2, 1)


class TestAnnihilatorSearch:
    def test_diag_squares_has_no_zero(self):
        # min over the sphere of sum v_i^4 is 1/3 (attained at the diagonal)
        rep = annihilator_zero_search(construct("diag-squares", 3, 3))
        assert not rep.found
        assert rep.min_value == pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_shear_zero_found_and_genuine(self):
        omega = construct("shear", 3, 2)
        rep = annihilator_zero_search(omega)
        assert rep.found
        v = np.asarray(rep.witness_v)
        quads = [v @ g.mat @ v for g in omega.pencil.generators]
        assert max(abs(q) for q in quads) <= 1e-6

    def test_zero_operator_found_everywhere(self):
        omega = OperatorSample(SymPencil([np.zeros((3, 3))]), None, "manual")
        rep = annihilator_zero_search(omega)
        assert rep.found and rep.min_value == 0.0


class TestMiddleEigZero:
    def test_known_pencil(self):
        pencil = SymPencil([np.eye(3), np.diag([1.0, -1.0, 0.0])])
        t = find_zero_middle_eig(OperatorSample(pencil, None, "manual"))
        assert abs(middle_eigenvalue(pencil.contract(t))) <= 1e-8

    def test_immediate_zero(self):
        pencil = SymPencil([np.diag([1.0, 0.0, -1.0]), np.eye(3)])
        t = find_zero_middle_eig(OperatorSample(pencil, None, "manual"))
        assert abs(middle_eigenvalue(pencil.contract(t))) <= 1e-8

    def test_random_harness(self):
        for seed in range(25):
            s = sample_operator(3, 2, seed)
            t = find_zero_middle_eig(s)
            assert abs(middle_eigenvalue(s.pencil.contract(t))) <= 1e-8
            assert np.linalg.norm(t) == pytest.approx(1.0, abs=1e-12)

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            find_zero_middle_eig(sample_operator(3, 3, 0))


class TestPhasePredictions:
    def test_U_thresholds(self):
        assert predicted_U(2, 1) == DENSE_CONULL     # C(2,2) = 1
        assert predicted_U(2, 2) == NOT_DENSE
        assert predicted_U(2, 3) == EMPTY            # C(3,2) = 3
        assert predicted_U(3, 3) == DENSE_CONULL
        assert predicted_U(3, 6) == EMPTY

    def test_Utilde_thresholds(self):
        assert predicted_Utilde(2, 1) == NOT_DENSE   # C(1,2) = 0 < 1 <= C(2,2)
        assert predicted_Utilde(2, 2) == EMPTY
        assert predicted_Utilde(3, 1) == DENSE_CONULL
        assert predicted_Utilde(3, 2) == EMPTY       # middle-eigenvalue obstruction
        assert predicted_Utilde(3, 4) == EMPTY
        assert predicted_Utilde(4, 3) == DENSE_CONULL

    def test_small_scan_consistent(self):
        reports = phase_scan(2, 60, budget=1024, seed=3)
        assert all(r.agree for r in reports)
        assert all(r.implication_violations == 0 for r in reports)
        by_cell = {(r.d, r.m): r for r in reports}
        assert by_cell[(2, 1)].freq_U == 1.0
        assert by_cell[(2, 3)].freq_U == 0.0
        assert 0.0 < by_cell[(2, 1)].freq_Utilde < 1.0

    def test_scan_validates(self):
        with pytest.raises(ValueError):
            phase_scan(5, 10)


class TestDimS:
    def test_expected_rank(self):
        assert dim_S_check(2) == 3
        assert dim_S_check(3) == 5

    def test_degenerate_point_drops_rank(self):
        # at v = w the derivative of (v, w) -> v v^T - w w^T loses extra rank
        d = 3
        v = np.array([1.0, 2.0, -1.0])
        cols = []
        for i in range(d):
            e = np.eye(d)[i]
            cols.append(flatten_sym(np.outer(v, e) + np.outer(e, v)))
            cols.append(flatten_sym(-np.outer(v, e) - np.outer(e, v)))
        J = np.stack(cols, axis=1)
        sigma = np.linalg.svd(J, compute_uv=False)
        rank = int(np.sum(sigma > 1e-8 * sigma[0]))
        assert rank < 2 * d - 1
