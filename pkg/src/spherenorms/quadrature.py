"""Quadrature rules on S^1 and S^2 with declared polynomial exactness.

d=1 rules are uniform grids on the circle (exact for trigonometric degree up
to n-1); d=2 rules are Gauss-Legendre in cos(theta) times a uniform grid in
phi (exact for total degree up to the declared bound).  ``oversample`` and
``max_spacing`` densify rules beyond the exactness requirement; that extra
resolution only matters for discontinuous integrands (set indicators), where
exactness claims do not apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceLimitError
from .geometry import frame_at
from .special import sphere_measure

__all__ = ["QuadratureRule", "build_quadrature", "cap_quadrature", "DEFAULT_MAX_NODES"]

DEFAULT_MAX_NODES = 6_000_000


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights on S^d integrating polynomials exactly up to exact_degree."""

    d: int
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int
    descriptor: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def integrate(self, values) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))


def _circle_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    theta = 2.0 * math.pi * np.arange(n) / n
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    weights = np.full(n, 2.0 * math.pi / n)
    return nodes, weights


def build_quadrature(
    d: int,
    exact_degree: int,
    oversample: float = 1.0,
    max_spacing: float | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> QuadratureRule:
    """Product rule on S^d exact to ``exact_degree``, densified by ``oversample``
    and, if given, until the nominal node spacing is below ``max_spacing``."""
    if exact_degree < 0:
        raise ValueError("exactness degree must be nonnegative")
    if oversample < 1.0:
        raise ValueError("oversample factor must be >= 1")
    if d == 1:
        n = int(math.ceil((exact_degree + 1) * oversample))
        if max_spacing is not None:
            n = max(n, int(math.ceil(2.0 * math.pi / max_spacing)))
        n = max(n, 4)
        if n > max_nodes:
            raise ResourceLimitError(f"rule would need {n} nodes (cap {max_nodes})")
        nodes, weights = _circle_rule(n)
        return QuadratureRule(1, nodes, weights, exact_degree, {"n": n, "oversample": oversample})
    if d != 2:
        raise ValueError(f"unsupported sphere dimension d={d}")

    n_t = int(math.ceil((exact_degree + 1) / 2.0 * oversample))
    n_phi = int(math.ceil((exact_degree + 1) * oversample))
    if max_spacing is not None:
        n_t = max(n_t, int(math.ceil(math.pi / max_spacing)))
        n_phi = max(n_phi, int(math.ceil(2.0 * math.pi / max_spacing)))
    n_t = max(n_t, 1)
    n_phi = max(n_phi, 1)
    if n_t * n_phi > max_nodes:
        raise ResourceLimitError(
            f"rule would need {n_t}x{n_phi}={n_t * n_phi} nodes (cap {max_nodes})"
        )
    x, wx = np.polynomial.legendre.leggauss(n_t)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w_phi = 2.0 * math.pi / n_phi
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    cos_p, sin_p = np.cos(phi), np.sin(phi)
    nodes = np.empty((n_t * n_phi, 3))
    nodes[:, 0] = np.outer(s, cos_p).ravel()
    nodes[:, 1] = np.outer(s, sin_p).ravel()
    nodes[:, 2] = np.repeat(x, n_phi)
    weights = np.repeat(wx * w_phi, n_phi)
    return QuadratureRule(
        2, nodes, weights, exact_degree, {"n_t": n_t, "n_phi": n_phi, "oversample": oversample}
    )


def cap_quadrature(d: int, center, radius: float, n_r: int = 48, n_phi: int = 96) -> QuadratureRule:
    """Local rule supported on the cap B(center, radius), exact for smooth caps.

    The cap is parametrized in polar coordinates around its center; weights
    sum to the exact cap measure.  Used for localized masses (doubling / weight
    diagnostics, regularized measure) where a global rule would be wasteful.
    """
    if not (0.0 < radius <= math.pi):
        raise ValueError(f"cap radius must lie in (0, pi], got {radius}")
    center = np.asarray(center, dtype=float)
    if d == 1:
        x, wx = np.polynomial.legendre.leggauss(n_r)
        theta0 = math.atan2(center[1], center[0])
        theta = theta0 + radius * x
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = radius * wx
        return QuadratureRule(1, nodes, weights, 0, {"cap": True, "n_r": n_r})
    if d != 2:
        raise ValueError(f"unsupported sphere dimension d={d}")
    # Gauss-Legendre in t = cos(polar angle) over [cos radius, 1]
    x, wx = np.polynomial.legendre.leggauss(n_r)
    a = math.cos(radius)
    t = 0.5 * (1.0 - a) * x + 0.5 * (1.0 + a)
    wt = 0.5 * (1.0 - a) * wx
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    w_phi = 2.0 * math.pi / n_phi
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    local = np.empty((n_r * n_phi, 3))
    local[:, 0] = np.outer(s, np.cos(phi)).ravel()
    local[:, 1] = np.outer(s, np.sin(phi)).ravel()
    local[:, 2] = np.repeat(t, n_phi)
    R = frame_at(center)
    nodes = local @ R.T
    weights = np.repeat(wt * w_phi, n_phi)
    return QuadratureRule(2, nodes, weights, 0, {"cap": True, "n_r": n_r, "n_phi": n_phi})


def full_mass_check(rule: QuadratureRule, tol: float = 1e-10) -> bool:
    """Whether the rule's total weight matches the sphere measure."""
    return abs(rule.weights.sum() - sphere_measure(rule.d)) <= tol * sphere_measure(rule.d)
