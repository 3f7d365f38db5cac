"""Hyperplanes, spherical-coordinate parameterization of unit normals,
projections, margins and induced partitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_io import Dataset

_UNIT_TOL = 1e-10


@dataclass(frozen=True)
class Hyperplane:
    """Hyperplane {x : v . x = b} with unit normal v.

    (v, b) and (-v, -b) describe the same point set; ``equivalent_to`` and
    ``canonical`` account for the sign ambiguity.
    """

    v: np.ndarray
    b: float

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
            raise ValueError(f"normal is not unit length: |v| = "
                             f"{np.linalg.norm(v)!r}")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "b", float(self.b))

    def canonical(self) -> "Hyperplane":
        """Sign-normalized copy: largest-magnitude coordinate of v positive."""
        i = int(np.argmax(np.abs(self.v)))
        if self.v[i] < 0:
            return Hyperplane(-self.v, -self.b)
        return self

    def equivalent_to(self, other: "Hyperplane", tol: float = 1e-10) -> bool:
        a, c = self.canonical(), other.canonical()
        return (np.allclose(a.v, c.v, atol=tol)
                and abs(a.b - c.b) <= tol * max(1.0, abs(a.b)))


def angles_to_unit_vector(theta) -> np.ndarray:
    """Spherical coordinates -> unit vector in R^(d) for theta in R^(d-1).

    v_i = cos(theta_i) * prod_{j<i} sin(theta_j) for i < d, and
    v_d = prod_j sin(theta_j).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s = np.sin(theta)
    c = np.cos(theta)
    prefix = np.concatenate(([1.0], np.cumprod(s)))
    v = np.empty(len(theta) + 1)
    v[:-1] = c * prefix[:-1]
    v[-1] = prefix[-1]
    return v


def unit_vector_to_angles(v) -> np.ndarray:
    """Inverse of :func:`angles_to_unit_vector`.

    When the inverse is underdetermined (an all-zero tail of v), the
    remaining angles are set to 0.  The last angle lies in [0, 2*pi).
    """
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-8:
        raise ValueError("input must be a unit vector")
    d = len(v)
    theta = np.zeros(d - 1)
    # tail norms r_i = ||(v_i, ..., v_d)||
    tail = np.sqrt(np.cumsum(v[::-1] ** 2))[::-1]
    for i in range(d - 2):
        if tail[i] == 0.0:
            theta[i] = 0.0
        else:
            theta[i] = np.arccos(np.clip(v[i] / tail[i], -1.0, 1.0))
    last = np.arctan2(v[-1], v[-2])
    if last < 0.0:
        last += 2.0 * np.pi
    theta[-1] = last if tail[-2] > 0.0 else 0.0
    return theta


def spherical_jacobian(theta) -> np.ndarray:
    """d x (d-1) matrix of partial derivatives of v(theta) w.r.t. theta.

    Columns are tangent to the unit sphere: v . (dv/dtheta_k) = 0.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = len(theta)
    d = m + 1
    s = np.sin(theta)
    c = np.cos(theta)
    prefix = np.concatenate(([1.0], np.cumprod(s)))  # prefix[i] = prod_{j<i} s_j
    jac = np.zeros((d, m))
    for k in range(m):
        # products prod_{j<i, j != k} s_j via cumprod with s_k replaced by 1
        t = s.copy()
        t[k] = 1.0
        cp = np.concatenate(([1.0], np.cumprod(t)))
        # diagonal: dv_k/dtheta_k = -s_k * prod_{j<k} s_j
        jac[k, k] = -s[k] * prefix[k]
        for_i = np.arange(k + 1, m)
        if len(for_i):
            jac[for_i, k] = c[for_i] * c[k] * cp[for_i]
        jac[d - 1, k] = c[k] * cp[m]
    return jac


def project(ds: Dataset, v) -> np.ndarray:
    """Projections of the rows onto the direction v."""
    return ds.rows @ np.asarray(v, dtype=float)


def margin(ds: Dataset, hp: Hyperplane) -> float:
    """Minimum Euclidean distance from the hyperplane to the nearest row."""
    return float(np.min(np.abs(ds.rows @ hp.v - hp.b)))


def partition(ds: Dataset, hp: Hyperplane) -> np.ndarray:
    """Side of the hyperplane for each row, in {-1, +1}; ties go to +1."""
    return np.where(ds.rows @ hp.v - hp.b >= 0.0, 1, -1)
