import numpy as np
import pytest

from genage import Dataset, solve_svm
from genage.errors import DimensionMismatch, SingleClassInput
from genage.smo import rank1_shrink

from _oracles import subgradient_svm_oracle, svm_oracle

XOR_FREE_X = np.array([[1.5, 1.0], [2.0, -0.5], [-1.2, 0.3], [-0.8, -1.0]])
XOR_FREE_Y = np.array([1, 1, -1, -1])
ANCHOR = np.array([1.0, 0.0])

# reference optima for the four-point set, from the generic convex-QP oracle
XOR_FREE_OBJ_PLAIN = 0.2575866222
XOR_FREE_OBJ_COUPLED = 2.5826446281


def xor_free_dataset():
    return Dataset(XOR_FREE_X, XOR_FREE_Y, np.where(XOR_FREE_Y > 0, 1, 2), num_ranks=2)


def test_symmetric_pair_is_max_margin_midpoint():
    ds = Dataset([[-1.0], [1.0]], [-1, 1], [1, 2], num_ranks=2)
    sol = solve_svm(ds, 10.0)
    assert sol.w == pytest.approx([1.0], abs=1e-8)
    assert sol.b == pytest.approx(0.0, abs=1e-8)
    assert sol.objective == pytest.approx(0.5, abs=1e-8)


def test_zero_anchor_matches_uncoupled_run():
    ds = xor_free_dataset()
    plain = solve_svm(ds, 10.0)
    anchored = solve_svm(ds, 10.0, anchor=np.zeros(2), lambda3=7.0)
    assert anchored.objective == pytest.approx(plain.objective, abs=1e-10)
    assert anchored.w == pytest.approx(plain.w, abs=1e-8)


def test_xor_free_coupled_matches_frozen_oracle_value():
    ds = xor_free_dataset()
    plain = solve_svm(ds, 10.0, anchor=ANCHOR, lambda3=0.0, tol=1e-8)
    coupled = solve_svm(ds, 10.0, anchor=ANCHOR, lambda3=5.0, tol=1e-8)
    assert plain.objective == pytest.approx(XOR_FREE_OBJ_PLAIN, abs=1e-4)
    assert coupled.objective == pytest.approx(XOR_FREE_OBJ_COUPLED, abs=1e-4)
    assert abs(coupled.w @ ANCHOR) < abs(plain.w @ ANCHOR)


def test_xor_free_against_live_oracles():
    ds = xor_free_dataset()
    coupled = solve_svm(ds, 10.0, anchor=ANCHOR, lambda3=5.0, tol=1e-8)
    qp_ref = svm_oracle(XOR_FREE_X, XOR_FREE_Y, 10.0, ANCHOR, 5.0)
    assert abs(coupled.objective - qp_ref) <= 1e-4 * max(1.0, abs(qp_ref))
    sg_ref = subgradient_svm_oracle(XOR_FREE_X, XOR_FREE_Y, 10.0, ANCHOR, 5.0, iters=60000)
    assert coupled.objective <= sg_ref + 1e-6  # descent oracle only upper-bounds


def test_random_instances_match_qp_oracle():
    rng = np.random.default_rng(11)
    from _oracles import random_svm_instance

    for _ in range(12):
        X, y, lam1, anchor, lam3 = random_svm_instance(rng)
        ds = Dataset(X, y, np.where(y > 0, 1, 2), num_ranks=2)
        sol = solve_svm(ds, lam1, anchor=anchor, lambda3=lam3, tol=1e-8)
        ref = svm_oracle(X, y, lam1, anchor, lam3)
        assert abs(sol.objective - ref) <= 1e-4 * max(1.0, abs(ref))


def test_objective_no_worse_than_zero_vector():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 3))
    y = np.where(rng.uniform(size=20) > 0.4, 1, -1)
    y[:2] = (1, -1)
    ds = Dataset(X, y, np.where(y > 0, 1, 2), num_ranks=2)
    lam1 = 2.5
    sol = solve_svm(ds, lam1, anchor=rng.normal(size=3), lambda3=4.0)
    assert sol.objective <= lam1 * len(y) + 1e-9


def test_metric_transform_equivalence():
    # solving the coupled problem equals solving a plain SVM on whitened
    # features and mapping the weights back
    rng = np.random.default_rng(5)
    X = rng.normal(size=(16, 3)) * 2
    y = np.where(rng.uniform(size=16) > 0.5, 1, -1)
    y[:2] = (1, -1)
    anchor = rng.normal(size=3)
    lam3 = 3.0
    ds = Dataset(X, y, np.where(y > 0, 1, 2), num_ranks=2)
    direct = solve_svm(ds, 4.0, anchor=anchor, lambda3=lam3, tol=1e-9)
    shrink = rank1_shrink(anchor, lam3)
    ds_white = Dataset(shrink(X), y, np.where(y > 0, 1, 2), num_ranks=2)
    whitened = solve_svm(ds_white, 4.0, tol=1e-9)
    assert shrink(whitened.w) == pytest.approx(direct.w, abs=1e-5)
    assert whitened.objective == pytest.approx(direct.objective, abs=1e-6)


def test_alignment_with_anchor_never_grows_with_coupling():
    ds = xor_free_dataset()
    ratios = []
    for lam3 in (0.0, 0.5, 2.0, 10.0, 100.0):
        sol = solve_svm(ds, 10.0, anchor=ANCHOR, lambda3=lam3, tol=1e-9)
        ratios.append(abs(sol.w @ ANCHOR) / np.linalg.norm(sol.w))
    assert all(b <= a + 1e-7 for a, b in zip(ratios, ratios[1:]))


def test_single_class_rejected():
    ds = Dataset([[0.0], [1.0]], [1, 1], [1, 2], num_ranks=2)
    with pytest.raises(SingleClassInput):
        solve_svm(ds, 1.0)


def test_identical_rows_rejected_instead_of_silent_zero():
    ds = Dataset([[1.0, 2.0]] * 4, [1, 1, -1, -1], [1, 1, 2, 2], num_ranks=2)
    with pytest.raises(SingleClassInput):
        solve_svm(ds, 1.0)


def test_anchor_dimension_checked():
    ds = xor_free_dataset()
    with pytest.raises(DimensionMismatch):
        solve_svm(ds, 1.0, anchor=np.ones(3), lambda3=1.0)


def test_zero_penalty_returns_zero_vector():
    ds = xor_free_dataset()
    sol = solve_svm(ds, 0.0)
    assert sol.objective == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(sol.w) == pytest.approx(0.0, abs=1e-12)
