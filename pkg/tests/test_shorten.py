import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detpath.cone2 import surgery2
from detpath.paths import PolylinePath
from detpath.shorten import (
    RegionOracle,
    cusp_oracle,
    cusp_points,
    cusp_ratio,
    cusp_record,
    default_cusp_resolution,
    disk_complement_oracle,
    glplus_oracle,
    grid_intrinsic_distance,
    shorten_path,
)


def halfplane():
    return RegionOracle(dimension=2, margin=lambda p: np.asarray(p)[..., 1] + 10.0)


def disk_geodesic(p, q, c, r):
    """Length of the shortest planar path from p to q avoiding an open disk."""
    dp, dq = np.linalg.norm(p - c), np.linalg.norm(q - c)
    theta = np.arccos(np.clip((p - c) @ (q - c) / (dp * dq), -1, 1))
    tp, tq = np.arccos(r / dp), np.arccos(r / dq)
    if theta <= tp + tq:
        return float(np.linalg.norm(p - q))
    return float(np.sqrt(dp**2 - r**2) + np.sqrt(dq**2 - r**2) + r * (theta - tp - tq))


def test_oracle_membership_matches_margin():
    o = cusp_oracle()
    pts = np.array([[1.0, 0.5], [0.1, 0.5], [0.0, -1.0]])
    np.testing.assert_array_equal(o.membership(pts), o.margin(pts) > 0)


def test_oracle_fd_gradient():
    o = RegionOracle(dimension=2, margin=lambda p: np.asarray(p)[..., 0] ** 2 - np.asarray(p)[..., 1] ** 3)
    p = np.array([[0.3, 0.2]])
    np.testing.assert_allclose(o.grad(p), cusp_oracle().grad(p), atol=1e-6)


def test_straight_path_is_fixed(rng):
    A = np.eye(3)
    B = A + 0.1 * rng.standard_normal((3, 3))
    t = np.linspace(0, 1, 11)
    path = PolylinePath((1 - t)[:, None, None] * A + t[:, None, None] * B)
    out = shorten_path(path, glplus_oracle(3), iters=100)
    assert out.length == pytest.approx(path.length, abs=1e-12)


def test_v_detour_converges():
    # chord from A to B is feasible; start from a V through a far point
    A, B = np.eye(2), np.diag([2.0, 0.5])
    far = np.array([[1.5, 3.0], [-3.0, 1.5]])
    t = np.linspace(0, 1, 20)
    leg1 = (1 - t)[:, None, None] * A + t[:, None, None] * far
    leg2 = (1 - t)[1:, None, None] * far + t[1:, None, None] * B
    path = PolylinePath(np.concatenate([leg1, leg2]))
    assert np.all(np.linalg.det(path.oversample()) > 0)
    out = shorten_path(path, glplus_oracle(2), iters=500)
    assert out.length <= 1.01 * np.linalg.norm(A - B)


def test_shorten_rejects_infeasible_node():
    path = PolylinePath(np.stack([np.eye(2), np.diag([1.0, -1.0]), np.eye(2)]))
    with pytest.raises(ValueError):
        shorten_path(path, glplus_oracle(2))


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_shorten_surgery2_output(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.standard_normal((2, 2, 2))
    A[0] *= np.sign(np.linalg.det(A))
    B[0] *= np.sign(np.linalg.det(B))
    cert = surgery2(A, B)
    out = shorten_path(cert.path, glplus_oracle(2), iters=200)
    assert out.length <= cert.length + 1e-9
    assert out.length >= cert.d_ext - 1e-9
    assert out.length <= 1.5 * cert.length
    assert np.all(np.linalg.det(out.nodes) > 0)
    np.testing.assert_array_equal(out.start, A)
    np.testing.assert_array_equal(out.end, B)


def test_grid_same_point():
    assert grid_intrinsic_distance(halfplane(), [0.0, 0.0], [0.0, 0.0], 0.1).length == 0.0


@pytest.mark.parametrize("angle", [0.0, 0.2, np.pi / 4, 1.0])
def test_grid_convex_region(angle):
    p = np.zeros(2)
    q = 2.0 * np.array([np.cos(angle), np.sin(angle)])
    res = grid_intrinsic_distance(halfplane(), p, q, 0.01)
    assert res.reachable
    assert 1.0 - 1e-9 <= res.length / 2.0 <= 1.0825


def test_grid_disk_obstacle():
    c, r = np.zeros(2), 1.0
    p, q = np.array([-2.0, 0.1]), np.array([2.0, -0.1])
    oracle = disk_complement_oracle(c, r, bounds=((-3, 3), (-3, 3)))
    exact = disk_geodesic(p, q, c, r)
    res = grid_intrinsic_distance(oracle, p, q, 0.01)
    assert abs(res.length - exact) <= 0.10 * exact
    coarse = grid_intrinsic_distance(oracle, p, q, 0.02)
    assert abs(coarse.length - res.length) <= 0.10 * res.length


def test_grid_unreachable():
    ring = RegionOracle(dimension=2, margin=lambda p: np.abs(np.linalg.norm(np.asarray(p), axis=-1) - 1.0) - 0.2)
    res = grid_intrinsic_distance(ring, [0.0, 0.0], [2.0, 0.0], 0.05, bounds=((-3, 3), (-3, 3)))
    assert not res.reachable and res.length == float("inf")


def test_grid_rejects_outside_endpoint():
    with pytest.raises(ValueError):
        grid_intrinsic_distance(cusp_oracle(), [0.0, 0.5], [1.0, 0.5], 0.01)
    with pytest.raises(ValueError):
        grid_intrinsic_distance(glplus_oracle(2), np.eye(2), np.eye(2), 0.1)


def test_cusp_points_outside_horn():
    for h in (0.4, 0.2, 0.1, 0.05):
        p, q = cusp_points(h, default_cusp_resolution(h))
        assert cusp_oracle().membership(np.stack([p, q])).all()


def test_cusp_large_h_bounded():
    r = cusp_ratio(0.5)
    assert 1.0 <= r < 5.0


def test_cusp_scaling():
    r2, r05 = cusp_ratio(0.2), cusp_ratio(0.05)
    assert abs(r05 / r2 - 2.0) <= 0.3 * 2.0


def test_cusp_record_fields():
    rec = cusp_record(0.4)
    assert set(rec) == {"h", "resolution", "d_ext", "d_int", "ratio"}
    assert rec["ratio"] == pytest.approx(rec["d_int"] / rec["d_ext"])
    assert rec["ratio"] >= 1.0


def test_cusp_regression():
    # frozen output of the default grid at h = 0.2
    assert cusp_ratio(0.2) == pytest.approx(2.4505771987367186, rel=1e-9)


def test_cusp_validates():
    with pytest.raises(ValueError):
        cusp_ratio(0.8)
    with pytest.raises(ValueError):
        cusp_ratio(0.2, resolution=0.05)
