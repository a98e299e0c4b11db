import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvedet.analyze import DegenerateError, estimate_axis, fit_sphere, jacobi_eigh
from curvedet.classify import classify_curve
from curvedet.generate import SalkowskiParams, salkowski_curve
from curvedet.selfcheck import fixtures


def rotation(seed):
    q, r = np.linalg.qr(np.random.default_rng(seed).normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    return q if np.linalg.det(q) > 0 else -q


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 6))
def test_jacobi_matches_numpy(seed, n):
    a = np.random.default_rng(seed).normal(size=(n, n))
    a = a + a.T
    w, v = jacobi_eigh(a)
    assert w == pytest.approx(np.linalg.eigvalsh(a), abs=1e-12 * max(1.0, np.abs(a).max()))
    assert np.abs(a @ v - v * w).max() <= 1e-11 * max(1.0, np.abs(a).max())
    assert np.abs(v.T @ v - np.eye(n)).max() <= 1e-12


def test_jacobi_rejects_asymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh([[1.0, 2.0], [0.0, 1.0]])


def test_identical_normals():
    est = estimate_axis(np.tile([0.0, 0.0, 1.0], (20, 1)))
    assert est.d == pytest.approx((0.0, 0.0, 1.0))
    assert est.std_dot == 0.0 and est.theta == 0.0


def test_salkowski_axis_angle():
    sc = salkowski_curve(SalkowskiParams(a=1.0, b=1.0)).sampled
    est = estimate_axis(sc.normals[::16])
    assert est.theta == pytest.approx(math.pi / 4, abs=1e-7)
    assert est.std_dot <= 1e-7


def test_control_curve_has_no_axis():
    report = classify_curve(fixtures()["control"], 64)
    normals = [fd.frame.N for fd in report.frenet]
    assert estimate_axis(normals).std_dot >= 1e-2


def test_axis_rotation_equivariant():
    N = salkowski_curve(SalkowskiParams(a=1.0, b=0.6)).sampled.normals[::32]
    base = np.array(estimate_axis(N).d)
    for seed in range(5):
        R = rotation(seed)
        rotated = np.array(estimate_axis(N @ R.T).d)
        assert np.abs(rotated - R @ base).max() <= 1e-9


def test_axis_not_unique():
    # two great circles through the x axis: variance is equal along y and z
    t = np.linspace(0, 2 * math.pi, 40, endpoint=False)
    ring = np.column_stack((np.cos(t), np.sin(t), np.zeros_like(t)))
    with pytest.raises(DegenerateError):
        estimate_axis(np.vstack((ring, ring[:, [0, 2, 1]])))


def test_axis_input_validation():
    with pytest.raises(ValueError):
        estimate_axis(np.ones((10, 3)))
    with pytest.raises(ValueError):
        estimate_axis(np.eye(3))


def sphere_points(center, radius, n=200, seed=0):
    v = np.random.default_rng(seed).normal(size=(n, 3))
    return np.asarray(center) + radius * v / np.linalg.norm(v, axis=1, keepdims=True)


def test_sphere_recovery():
    fit = fit_sphere(sphere_points((0, 0, 0), 1.0))
    assert fit.center == pytest.approx((0, 0, 0), abs=1e-12)
    assert fit.radius == pytest.approx(1.0, rel=1e-12)
    fit = fit_sphere(sphere_points((1, 2, 3), 2.0, seed=1))
    assert fit.center == pytest.approx((1, 2, 3), abs=1e-11)
    assert fit.radius == pytest.approx(2.0, rel=1e-12)
    assert fit.rms <= 1e-12


def test_sphere_degenerate():
    t = np.linspace(0, 2 * math.pi, 50)
    circle = np.column_stack((np.cos(t), np.sin(t), np.zeros_like(t)))
    with pytest.raises(DegenerateError):
        fit_sphere(circle)
    with pytest.raises(DegenerateError):
        fit_sphere(np.ones((10, 3)))
    with pytest.raises(ValueError):
        fit_sphere(np.zeros((3, 3)))
