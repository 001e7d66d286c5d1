import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from detpath.strata import (
    StratumLabel,
    classify_rank,
    distance_to_variety,
    normalize_stratum_point,
    project_to_rank,
    rank_bump_direction,
    stratum_jacobian_spectrum,
    transport_bump,
)
from oracles import random_rank, random_singular_search

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_classify_examples(rng):
    assert classify_rank(np.zeros((3, 3))) == StratumLabel(k=0, tau=1e-8)
    assert classify_rank(np.diag([1.0, 1.0, 0.0])).k == 2
    v, w = rng.standard_normal((2, 3))
    assert classify_rank(np.outer(v / np.linalg.norm(v), w / np.linalg.norm(w))).k == 1


def test_classify_rejects_tau():
    with pytest.raises(ValueError):
        classify_rank(np.eye(2), tau=0.5)
    with pytest.raises(ValueError):
        classify_rank(np.eye(2), tau=0.0)


@given(st.integers(2, 5), st.integers(0, 5), st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_classify_scale_equivariant(n, k, c, seed):
    k = min(k, n)
    A = random_rank(n, k, np.random.default_rng(seed))
    assert classify_rank(c * A, floor=0.0).k == classify_rank(A, floor=0.0).k == k


def test_distance_examples():
    assert distance_to_variety(np.diag([3.0, 1.0])) == pytest.approx(1.0)
    assert distance_to_variety(np.diag([1.0, 0.0, 2.0])) == 0.0


def test_distance_random_search_oracle(rng):
    A = rng.standard_normal((3, 3))
    s3 = distance_to_variety(A)
    # no singular matrix beats the truncation, and the truncation achieves s3
    found = random_singular_search(A, rng, trials=100_000)
    assert found >= s3 - 1e-12
    assert np.linalg.norm(A - project_to_rank(A, 2)) == pytest.approx(s3, abs=1e-12)
    assert abs(np.linalg.det(project_to_rank(A, 2))) <= 1e-12


def test_project_examples(rng):
    np.testing.assert_allclose(project_to_rank(np.diag([3.0, 1.0]), 1), np.diag([3.0, 0.0]), atol=1e-15)
    L = random_rank(4, 2, rng)
    np.testing.assert_allclose(project_to_rank(L, 2), L, atol=1e-10)
    A = rng.standard_normal((3, 3))
    s = np.linalg.svd(A, compute_uv=False)
    assert np.linalg.norm(A - project_to_rank(A, 2)) == pytest.approx(s[2], abs=1e-10)
    with pytest.raises(ValueError):
        project_to_rank(A, 4)


@given(arrays(np.float64, (4, 4), elements=finite), st.integers(0, 4))
def test_project_tail_norm(A, r):
    s = np.linalg.svd(A, compute_uv=False)
    P = project_to_rank(A, r)
    assert np.linalg.norm(A - P) == pytest.approx(np.sqrt(np.sum(s[r:] ** 2)), abs=1e-10 * (1 + s[0]))
    assert np.sum(np.linalg.svd(P, compute_uv=False) > 1e-9 * (1 + s[0])) <= r


def test_bump_examples(rng):
    D = rank_bump_direction(np.diag([1.0, 0.0, 0.0]), 1)
    np.testing.assert_allclose(np.abs(D), np.diag([0, 1.0, 0]), atol=1e-15)
    bumped = np.diag([1.0, 0.0, 0.0]) + 1e-3 * np.abs(D)
    assert classify_rank(bumped).k == 2 and abs(np.linalg.det(bumped)) == 0.0
    D0 = rank_bump_direction(np.zeros((2, 2)), 0)
    assert classify_rank(1e-3 * D0).k == 1
    L = random_rank(3, 1, rng)
    s = np.linalg.svd(L + 1e-3 * rank_bump_direction(L, 1), compute_uv=False)
    assert s[1] == pytest.approx(1e-3, abs=1e-10) and s[2] <= 1e-10


def test_bump_rejects_top_stratum():
    with pytest.raises(ValueError):
        rank_bump_direction(np.diag([1.0, 1.0, 0.0]), 2)


@given(st.integers(2, 5), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_bump_unit_and_orthogonal(n, k, seed):
    k = min(k, n - 2)
    A = random_rank(n, k, np.random.default_rng(seed))
    D = rank_bump_direction(A, k)
    assert np.linalg.norm(D) == pytest.approx(1.0)
    assert abs(np.sum(D * A)) <= 1e-8 * (1 + np.linalg.norm(A))


def test_transport_keeps_direction_close(rng):
    L = random_rank(4, 2, rng)
    D = rank_bump_direction(L, 2)
    L2 = L + 1e-4 * random_rank(4, 2, rng)
    L2 = project_to_rank(L2, 2)
    D2 = transport_bump(D, L2, 2)
    assert np.linalg.norm(D2) == pytest.approx(1.0)
    assert np.sum(D * D2) > 0.99


def test_normal_form_examples(rng):
    J = np.diag([1.0, 1.0, 0.0])
    f = normalize_stratum_point(J)
    np.testing.assert_allclose(np.abs(f.p), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(f.p @ J @ f.q, J, atol=1e-14)
    f = normalize_stratum_point(np.diag([2.0, 0.0]))
    np.testing.assert_allclose(np.abs(f.p), np.diag([0.5, 1.0]), atol=1e-14)
    A = random_rank(4, 2, rng)
    f = normalize_stratum_point(A)
    assert f.k == 2
    target = np.diag([1.0, 1.0, 0.0, 0.0])
    assert np.linalg.norm(f.p @ A @ f.q - target) <= 1e-8
    assert abs(np.linalg.det(f.p)) > 0 and abs(np.linalg.det(f.q)) > 0


@pytest.mark.parametrize("n,k", [(3, 1), (3, 2), (4, 2), (4, 3)])
def test_stratum_dimension(n, k, rng):
    L, R = rng.standard_normal((2, n, n))
    s = stratum_jacobian_spectrum(L, R, k)
    dim = n * n - (n - k) ** 2
    assert s[dim - 1] / s[0] > 1e-6
    assert s[dim] <= 1e-6 * s[0]


def test_transverse_slice_cut_out_by_lower_block(rng):
    # near I_k (+) 0 the variety is {det(lower block) = 0}
    for _ in range(10):
        M = rng.standard_normal((2, 2))
        A = np.zeros((3, 3))
        A[0, 0] = 1.0
        A[1:, 1:] = M
        assert np.linalg.det(A) == pytest.approx(np.linalg.det(M))
