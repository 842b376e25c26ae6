"""Orthonormal bases of the degree-L polynomial space on S^1 and S^2.

d=2 uses real spherical harmonics built from fully normalized associated
Legendre functions (positive convention, no Condon-Shortley sign); d=1 uses
the trigonometric system {1/sqrt(2 pi), cos(k t)/sqrt(pi), sin(k t)/sqrt(pi)}.
Ordering is (degree, order) lexicographic: for each degree the m = 0 function
comes first, then cos/sin pairs for m = 1..degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import dim_pi

__all__ = ["BasisSpec", "basis_dim", "basis_matrix", "basis_eval", "normalized_assoc_legendre"]


@dataclass(frozen=True)
class BasisSpec:
    d: int
    L: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"unsupported sphere dimension d={self.d}")
        if self.L < 0:
            raise ValueError("degree must be nonnegative")


def basis_dim(spec: BasisSpec) -> int:
    return dim_pi(spec.d, spec.L)


def normalized_assoc_legendre(L: int, x) -> np.ndarray:
    """Fully normalized associated Legendre table, shape (L+1, L+1, n).

    Entry [l, m] is N_{l m} P_l^m(x) with the normalization chosen so that the
    real harmonics built in ``basis_matrix`` have unit L^2(sigma) norm:
    integral over the sphere of (table[l,0])^2 d sigma = 1 for m = 0 and the
    cos/sin pairs carry an extra sqrt(2).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((L + 1, L + 1, x.size))
    P[0, 0] = math.sqrt(1.0 / (4.0 * math.pi))
    for m in range(1, L + 1):
        P[m, m] = math.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, L + 1):
        if m + 1 <= L:
            P[m + 1, m] = math.sqrt(2 * m + 3.0) * x * P[m, m]
        for l in range(m + 2, L + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


def _basis_matrix_circle(L: int, points: np.ndarray) -> np.ndarray:
    theta = np.arctan2(points[:, 1], points[:, 0])
    n = points.shape[0]
    B = np.empty((n, 2 * L + 1))
    B[:, 0] = 1.0 / math.sqrt(2.0 * math.pi)
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    for k in range(1, L + 1):
        B[:, 2 * k - 1] = np.cos(k * theta) * inv_sqrt_pi
        B[:, 2 * k] = np.sin(k * theta) * inv_sqrt_pi
    return B


def _basis_matrix_sphere(L: int, points: np.ndarray) -> np.ndarray:
    """Real spherical harmonic values, looping over the order m to keep memory
    at O((L+1) * n) instead of the full (L+1)^2 * n Legendre cube."""
    x = points[:, 2]
    phi = np.arctan2(points[:, 1], points[:, 0])
    n = points.shape[0]
    N = (L + 1) ** 2
    B = np.empty((n, N))

    # column index of (l, m-part): per degree l the layout is
    # [m=0, (1,cos), (1,sin), ..., (l,cos), (l,sin)]
    def col(l, m, is_sin):
        return l * l + (0 if m == 0 else 2 * m - 1 + (1 if is_sin else 0))

    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    sqrt2 = math.sqrt(2.0)
    pmm = np.full(n, math.sqrt(1.0 / (4.0 * math.pi)))
    for m in range(0, L + 1):
        if m > 0:
            pmm = math.sqrt((2 * m + 1) / (2.0 * m)) * s * pmm
        if m == 0:
            cos_m = np.ones(n)
            sin_m = None
        else:
            cos_m = np.cos(m * phi)
            sin_m = np.sin(m * phi)
        p_prev = pmm
        p_cur = math.sqrt(2 * m + 3.0) * x * pmm if m + 1 <= L else None
        for l in range(m, L + 1):
            if l == m:
                p = p_prev
            elif l == m + 1:
                p = p_cur
            else:
                a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
                p = a * (x * p_cur - b * p_prev)
                p_prev, p_cur = p_cur, p
            if m == 0:
                B[:, col(l, 0, False)] = p
            else:
                B[:, col(l, m, False)] = sqrt2 * p * cos_m
                B[:, col(l, m, True)] = sqrt2 * p * sin_m
    return B


def basis_matrix(spec: BasisSpec, points) -> np.ndarray:
    """Matrix of all basis values at the given points: shape (n_points, dim Pi_L)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != spec.d + 1:
        raise ValueError(f"points must have {spec.d + 1} coordinates")
    if spec.d == 1:
        return _basis_matrix_circle(spec.L, pts)
    return _basis_matrix_sphere(spec.L, pts)


def basis_eval(spec: BasisSpec, u) -> np.ndarray:
    """All basis values at a single point."""
    return basis_matrix(spec, np.atleast_2d(np.asarray(u, dtype=float)))[0]
