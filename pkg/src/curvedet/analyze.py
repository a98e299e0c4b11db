"""Geometric estimators: fixed axis of a family of normals, algebraic sphere fit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateError(ArithmeticError):
    pass


def jacobi_eigh(a, max_sweeps: int = 30, tol: float = 1e-14):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and eigenvectors in the columns of ``v``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("jacobi_eigh needs a square symmetric matrix")
    v = np.eye(n)
    scale = max(np.abs(a).max(), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(n) for q in range(p + 1, n)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


@dataclass(frozen=True)
class AxisEstimate:
    d: tuple
    mean_dot: float
    std_dot: float
    theta: float

    def to_json(self) -> dict:
        return {
            "d": list(self.d),
            "mean_dot": self.mean_dot,
            "std_dot": self.std_dot,
            "theta": self.theta,
        }


def estimate_axis(normals) -> AxisEstimate:
    """Unit direction ``d`` minimizing the variance of ``<N_i, d>``.

    ``d`` is the eigenvector of the normals' covariance for its smallest
    eigenvalue; its sign makes the mean dot product non-negative.
    """
    N = np.asarray(normals, dtype=float)
    if N.ndim != 2 or N.shape[1] != 3 or len(N) < 8:
        raise ValueError("estimate_axis needs at least 8 three-dimensional normals")
    if np.abs(np.linalg.norm(N, axis=1) - 1.0).max() > 1e-9:
        raise ValueError("normals must be unit vectors")
    mean = N.mean(axis=0)
    X = N - mean
    w, v = jacobi_eigh(X.T @ X / len(N))
    if w[2] <= 1e-12:
        # all normals coincide; the common direction is the natural axis
        d = mean / np.linalg.norm(mean)
    elif w[1] - w[0] < 1e-12:
        raise DegenerateError(
            f"axis not unique: smallest covariance eigenvalues {w[0]:.3g}, {w[1]:.3g}"
        )
    else:
        d = v[:, 0] / np.linalg.norm(v[:, 0])
    dots = N @ d
    if dots.mean() < 0:
        d, dots = -d, -dots
    mean_dot = float(dots.mean())
    return AxisEstimate(
        d=tuple(float(x) for x in d),
        mean_dot=mean_dot,
        std_dot=float(dots.std()),
        theta=math.acos(min(1.0, abs(mean_dot))),
    )


@dataclass(frozen=True)
class SphereFit:
    center: tuple
    radius: float
    rms: float

    def to_json(self) -> dict:
        return {"center": list(self.center), "radius": self.radius, "rms": self.rms}


def fit_sphere(points, rank_tol: float = 1e-10) -> SphereFit:
    """Algebraic least-squares sphere through ``points``.

    Solves ``|p|^2 = 2 c.p + k`` for the center ``c`` and ``k = r^2 - |c|^2``
    (points are shifted to their centroid first for conditioning).  Co-planar
    or co-circular data make the 4x4 normal matrix singular and raise
    :class:`DegenerateError`.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < 4:
        raise ValueError("fit_sphere needs at least 4 three-dimensional points")
    centroid = P.mean(axis=0)
    Q = P - centroid
    scale = np.sqrt((Q * Q).sum(axis=1).mean())
    if scale == 0:
        raise DegenerateError("all points coincide")
    Q = Q / scale
    A = np.column_stack((2 * Q, np.ones(len(Q))))
    rhs = (Q * Q).sum(axis=1)
    M = A.T @ A
    w, _ = jacobi_eigh(M)
    if w[0] <= rank_tol * w[-1]:
        raise DegenerateError(
            f"normal matrix is rank deficient (eigenvalue ratio {w[0] / w[-1]:.3g}); "
            "points are co-planar or co-circular"
        )
    sol = np.linalg.solve(M, A.T @ rhs)
    c = sol[:3]
    r2 = sol[3] + c @ c
    if r2 <= 0:
        raise DegenerateError("fitted radius is not positive")
    center = centroid + scale * c
    radius = scale * math.sqrt(r2)
    resid = np.linalg.norm(P - center, axis=1) - radius
    return SphereFit(
        center=tuple(float(x) for x in center),
        radius=float(radius),
        rms=float(np.sqrt(np.mean(resid**2))),
    )
