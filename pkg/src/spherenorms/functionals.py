"""Geometric functionals on set families and weights: local relative density,
harmonic measure and its boundary-layer infimum, doubling diagnostics,
A_infinity / RH_infinity checks, and the good-cap regularization E*.

Infima over the sphere are approximated from above by minima over explicit
center grids; every report records the grid and rule used so runs reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateMeasureError, NetConstructionError, ResolutionError
from .geometry import (
    candidate_centers,
    cap_measure,
    covering_net,
    fibonacci_lattice,
    frame_at,
    random_points,
    uniform_circle,
)
from .measures import Lebesgue, MeasureSpec, PowerDistanceWeight, cap_mass, weight_values
from .quadrature import QuadratureRule, build_quadrature, cap_quadrature
from .sets import CapUnion, EmptySet, SetSpec, membership, min_feature_scale
from .special import sphere_measure

__all__ = [
    "DensityReport",
    "HarmonicReport",
    "WeightReport",
    "relative_density",
    "density_profile",
    "harmonic_measure",
    "harmonic_infimum",
    "doubling_constant",
    "ainfty_check",
    "rhinfty_check",
    "regularize_set",
]

_CENTER_CHUNK = 512
_NODE_CHUNK = 32768


@dataclass(frozen=True, eq=False)
class DensityReport:
    """Grid minimum of the local density ratio (an upper approximation of the infimum)."""

    rho_hat: float
    argmin_center: np.ndarray
    r: float
    L: int
    resolution: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class HarmonicReport:
    """Grid minimum of harmonic measure over the shell |x| = 1 - 1/L."""

    delta_hat: float
    argmin_center: np.ndarray
    L: int
    resolution: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class WeightReport:
    """Sampled weight diagnostics; only the fields of the check that ran are set."""

    doubling_constant: float | None = None
    doubling_exponent: float | None = None
    doubling_c_low: float | None = None
    doubling_c_high: float | None = None
    ainfty: tuple | None = None
    rhinfty: tuple | None = None
    config: dict = field(default_factory=dict)
    witness: dict | None = None


def _local_masses(centers, rule, num_values, den_values, num_radius, den_radius):
    """Per-center masses over caps: num over B(c, num_radius), den over B(c, den_radius)."""
    n_c = centers.shape[0]
    num = np.zeros(n_c)
    den = np.zeros(n_c)
    cos_num = math.cos(num_radius)
    cos_den = math.cos(den_radius)
    for c0 in range(0, n_c, _CENTER_CHUNK):
        cc = centers[c0 : c0 + _CENTER_CHUNK]
        acc_n = np.zeros(cc.shape[0])
        acc_d = np.zeros(cc.shape[0])
        for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
            D = cc @ rule.nodes[i0 : i0 + _NODE_CHUNK].T
            acc_n += (D >= cos_num) @ num_values[i0 : i0 + _NODE_CHUNK]
            acc_d += (D >= cos_den) @ den_values[i0 : i0 + _NODE_CHUNK]
        num[c0 : c0 + _CENTER_CHUNK] = acc_n
        den[c0 : c0 + _CENTER_CHUNK] = acc_d
    return num, den


def _density_rule(E: SetSpec, d: int, window: float, rule: QuadratureRule | None) -> QuadratureRule:
    if rule is not None:
        return rule
    spacing = min(min_feature_scale(E), window) / 2.5
    return build_quadrature(d, 0, max_spacing=spacing)


def density_profile(
    E: SetSpec,
    mu: MeasureSpec,
    L: int,
    num_radius: float,
    den_radius: float,
    resolution: int | None = None,
    rule: QuadratureRule | None = None,
    d: int | None = None,
) -> DensityReport:
    """Min over grid centers u of mu(E cap B(u, num_radius)) / mu(B(u, den_radius))."""
    if d is None:
        if rule is None:
            raise ValueError("give either a rule or the sphere dimension d")
        d = rule.d
    if L < 1:
        raise ValueError("degree must be >= 1")
    scale = min(num_radius, den_radius)
    if resolution is None:
        # default 6L centers per great circle, refined if the windows are smaller
        resolution = max(6 * L, int(math.ceil(2.0 * math.pi / scale)) + 1)
    spacing = 2.0 * math.pi / resolution
    if spacing > scale + 1e-15:
        raise ResolutionError(
            f"center grid spacing {spacing:.4g} is coarser than the cap scale "
            f"{scale:.4g}; raise the resolution"
        )
    rule = _density_rule(E, d, min(num_radius, den_radius), rule)
    centers = candidate_centers(d, L, resolution)
    ind = membership(E, rule.nodes).astype(float)
    den_vals = rule.weights * weight_values(mu, rule.nodes)
    num_vals = den_vals * ind
    num, den = _local_masses(centers, rule, num_vals, den_vals, num_radius, den_radius)
    if np.any(den <= 0.0):
        raise ResolutionError("a window cap caught no quadrature node; refine the rule")
    rho = num / den
    i = int(np.argmin(rho))
    return DensityReport(
        rho_hat=float(rho[i]),
        argmin_center=centers[i].copy(),
        r=num_radius * L,
        L=L,
        resolution={
            "per_great_circle": resolution,
            "n_centers": centers.shape[0],
            "rule": dict(rule.descriptor),
        },
    )


def relative_density(
    E: SetSpec,
    mu: MeasureSpec,
    L: int,
    r: float,
    resolution: int | None = None,
    rule: QuadratureRule | None = None,
    d: int | None = None,
) -> DensityReport:
    """Grid approximation of inf_u mu(E cap B(u, r/L)) / mu(B(u, r/L))."""
    if r <= 0:
        raise ValueError("scale parameter r must be positive")
    return density_profile(E, mu, L, r / L, r / L, resolution=resolution, rule=rule, d=d)


def poisson_kernel(x, nodes, d: int) -> np.ndarray:
    """(1 - |x|^2)/|x - u|^(d+1) for an interior point x against node rows u."""
    x = np.asarray(x, dtype=float)
    rho_sq = float(x @ x)
    if rho_sq >= 1.0:
        raise ValueError("evaluation point must lie strictly inside the unit ball")
    dist_sq = 1.0 + rho_sq - 2.0 * (nodes @ x)
    return (1.0 - rho_sq) * dist_sq ** (-(d + 1) / 2.0)


def harmonic_measure(E: SetSpec, x, rule: QuadratureRule) -> float:
    """Poisson integral of the indicator of E at the interior point x."""
    x = np.asarray(x, dtype=float)
    d = rule.d
    mask = membership(E, rule.nodes)
    if not mask.any():
        return 0.0
    k = poisson_kernel(x, rule.nodes[mask], d)
    return float(rule.weights[mask] @ k) / sphere_measure(d)


def harmonic_infimum(
    E: SetSpec,
    L: int,
    resolution: int | None = None,
    rule: QuadratureRule | None = None,
    d: int | None = None,
) -> HarmonicReport:
    """Min of harmonic measure over x = (1 - 1/L) u with u on the center grid."""
    if d is None:
        if rule is None:
            raise ValueError("give either a rule or the sphere dimension d")
        d = rule.d
    if L < 1:
        raise ValueError("degree must be >= 1")
    if resolution is None:
        resolution = 6 * L
    if rule is None:
        spacing = min(min_feature_scale(E), 1.0 / L) / 2.5
        rule = build_quadrature(d, 0, max_spacing=spacing)
    centers = candidate_centers(d, L, resolution)
    mask = membership(E, rule.nodes)
    if not mask.any():
        return HarmonicReport(0.0, centers[0].copy(), L, {"per_great_circle": resolution})
    nodes_E = rule.nodes[mask]
    vals_E = rule.weights[mask] / sphere_measure(d)
    rho = 1.0 - 1.0 / L
    best = math.inf
    best_i = 0
    pref = 1.0 - rho * rho
    expo = -(d + 1) / 2.0
    for c0 in range(0, centers.shape[0], _CENTER_CHUNK):
        cc = centers[c0 : c0 + _CENTER_CHUNK]
        acc = np.zeros(cc.shape[0])
        for i0 in range(0, nodes_E.shape[0], _NODE_CHUNK):
            D = cc @ nodes_E[i0 : i0 + _NODE_CHUNK].T
            K = pref * (1.0 + rho * rho - 2.0 * rho * D) ** expo
            acc += K @ vals_E[i0 : i0 + _NODE_CHUNK]
        j = int(np.argmin(acc))
        if acc[j] < best:
            best = float(acc[j])
            best_i = c0 + j
    return HarmonicReport(
        delta_hat=best,
        argmin_center=centers[best_i].copy(),
        L=L,
        resolution={"per_great_circle": resolution, "n_centers": centers.shape[0], "rule": dict(rule.descriptor)},
    )


def _sample_centers(mu: MeasureSpec, d: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pts = [random_points(d, n, rng)]
    if isinstance(mu, PowerDistanceWeight):
        pts.append(mu.pole[None, :])
    return np.vstack(pts)


def doubling_constant(
    mu: MeasureSpec,
    scales,
    centers: np.ndarray | None = None,
    d: int | None = None,
    seed: int = 0,
    n_centers: int = 24,
) -> WeightReport:
    """Sampled doubling constant sup mu(B(u, 2 delta))/mu(B(u, delta)) plus a
    power-growth exponent fitted to the sampled ball masses."""
    scales = np.asarray(sorted(float(s) for s in scales))
    if scales.size == 0 or scales.min() <= 0 or scales.max() > math.pi / 2:
        raise ValueError("scales must lie in (0, pi/2]")
    if centers is None:
        if d is None:
            raise ValueError("give centers or the sphere dimension d")
        centers = _sample_centers(mu, d, n_centers, seed)
    else:
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        d = centers.shape[1] - 1
    radii = np.unique(np.concatenate([scales, 2.0 * scales]))
    masses = np.empty((centers.shape[0], radii.size))
    for i, u in enumerate(centers):
        for j, rad in enumerate(radii):
            masses[i, j] = cap_mass(mu, d, u, float(rad))
    if np.any(masses <= 0.0):
        bad = np.argwhere(masses <= 0.0)[0]
        raise DegenerateMeasureError(
            f"mu(B(u, {radii[bad[1]]:.4g})) = 0 at center index {bad[0]}"
        )
    idx2 = np.searchsorted(radii, 2.0 * scales)
    idx1 = np.searchsorted(radii, scales)
    ratios = masses[:, idx2] / masses[:, idx1]
    C = float(ratios.max())

    growth = []
    for j in range(radii.size):
        for k in range(j + 1, radii.size):
            g = np.log(masses[:, k] / masses[:, j]) / math.log(radii[k] / radii[j])
            growth.append(g)
    growth = np.concatenate(growth)
    gamma = max(1.0, float(growth.max()))
    # constants making the two-sided power sandwich hold on all sampled pairs
    c_high = 1.0
    c_low = 1.0
    for j in range(radii.size):
        for k in range(j + 1, radii.size):
            q = radii[k] / radii[j]
            ratio = masses[:, k] / masses[:, j]
            c_high = max(c_high, float((ratio / q**gamma).max()))
            c_low = max(c_low, float((q ** (1.0 / gamma) / ratio).max()))
    return WeightReport(
        doubling_constant=C,
        doubling_exponent=gamma,
        doubling_c_low=c_low,
        doubling_c_high=c_high,
        config={"scales": scales.tolist(), "n_centers": int(centers.shape[0]), "seed": seed},
    )


def _tangent_at(u: np.ndarray) -> np.ndarray:
    """A fixed unit tangent at u (first frame column pushed to u)."""
    R = frame_at(u)
    e = np.zeros(u.shape[0])
    e[0] = 1.0
    t = R @ e
    t = t - (t @ u) * u
    n = np.linalg.norm(t)
    if n < 1e-9:
        e = np.zeros(u.shape[0])
        e[1] = 1.0
        t = R @ e
        t = t - (t @ u) * u
        n = np.linalg.norm(t)
    return t / n


def _ainfty_subsets(mu: MeasureSpec, d: int, u: np.ndarray, delta: float):
    """(sigma(E), omega(E), tag) for the structured subsets of B(u, delta)."""
    out = []
    sig_b = cap_measure(d, delta)
    w_b = cap_mass(mu, d, u, delta)
    for frac, tag in ((0.5, "half-subcap"), (0.25, "quarter-subcap")):
        out.append((cap_measure(d, frac * delta), cap_mass(mu, d, u, frac * delta), tag))
    half_sig = cap_measure(d, 0.5 * delta)
    half_w = cap_mass(mu, d, u, 0.5 * delta)
    out.append((sig_b - half_sig, w_b - half_w, "annulus"))
    shifted = math.cos(delta / 2.0) * u + math.sin(delta / 2.0) * _tangent_at(u)
    shifted = shifted / np.linalg.norm(shifted)
    out.append((cap_measure(d, delta / 2.0), cap_mass(mu, d, shifted, delta / 2.0), "offcenter-subcap"))
    return sig_b, w_b, out


def ainfty_check(
    mu: MeasureSpec,
    d: int,
    seed: int = 0,
    n_caps: int = 12,
    radii=(0.2, 0.5, 1.0),
    betas=(0.5, 1.0, 2.0),
) -> WeightReport:
    """Smallest (B, beta) on the beta grid making omega(B) <= B (sigma(B)/sigma(E))^beta omega(E)
    hold over the sampled caps and structured subsets; failure carries a witness."""
    centers = _sample_centers(mu, d, n_caps, seed)
    records = []
    witness = None
    passed = True
    for u in centers:
        for delta in radii:
            sig_b, w_b, subsets = _ainfty_subsets(mu, d, u, float(delta))
            for sig_e, w_e, tag in subsets:
                if sig_e <= 0:
                    continue
                if w_e <= 0.0:
                    if w_b > 0.0:
                        passed = False
                        if witness is None:
                            witness = {"center": u.tolist(), "delta": float(delta), "subset": tag}
                    continue
                records.append((w_b, sig_b, w_e, sig_e))
    best_beta = None
    best_B = math.inf
    per_beta = {}
    for beta in betas:
        if not records:
            break
        need = max(w_b / ((sig_b / sig_e) ** beta * w_e) for w_b, sig_b, w_e, sig_e in records)
        per_beta[float(beta)] = float(need)
        if need < best_B:
            best_B = float(need)
            best_beta = float(beta)
    if not passed:
        best_B = math.inf
    return WeightReport(
        ainfty=(best_B, best_beta, passed),
        config={"seed": seed, "n_caps": n_caps, "radii": list(radii), "per_beta": per_beta},
        witness=witness,
    )


def rhinfty_check(
    mu: MeasureSpec,
    d: int,
    seed: int = 0,
    n_caps: int = 12,
    radii=(0.2, 0.5, 1.0),
) -> WeightReport:
    """Smallest C with omega(u) <= (C/sigma(B)) integral_B omega over the sampled caps,
    the supremum probed on local quadrature nodes."""
    centers = _sample_centers(mu, d, n_caps, seed)
    C = 1.0
    passed = True
    witness = None
    for u in centers:
        for delta in radii:
            local = cap_quadrature(d, u, float(delta))
            avg = cap_mass(mu, d, u, float(delta)) / cap_measure(d, float(delta))
            sup = float(weight_values(mu, np.vstack([local.nodes, u[None, :]])).max())
            if avg <= 0.0:
                if sup > 0.0:
                    passed = False
                    if witness is None:
                        witness = {"center": u.tolist(), "delta": float(delta)}
                continue
            if not math.isfinite(sup):
                passed = False
                if witness is None:
                    witness = {"center": u.tolist(), "delta": float(delta), "sup": "inf"}
            C = max(C, sup / avg)
    if not passed:
        C = math.inf
    return WeightReport(
        rhinfty=(C, passed),
        config={"seed": seed, "n_caps": n_caps, "radii": list(radii)},
        witness=witness,
    )


def regularize_set(
    E: SetSpec,
    L: int,
    eps: float,
    delta: float | None = None,
    d: int | None = None,
    rule: QuadratureRule | None = None,
    default_delta_r: float = 2.0,
    overlap_cap: int = 24,
) -> SetSpec:
    """Good-cap regularization: cover the sphere by caps B(v, eps/L) on a net,
    keep those holding at least a delta fraction of surface measure of E, and
    return their union.

    With delta unset, half the measured relative density of E at scale
    ``default_delta_r``/L is used, matching the construction's smallness
    requirement on delta relative to the density.
    """
    if d is None:
        if rule is None:
            raise ValueError("give either a rule or the sphere dimension d")
        d = rule.d
    if L < 1 or eps <= 0:
        raise ValueError("need L >= 1 and eps > 0")
    radius = eps / L
    net = covering_net(d, radius)
    if delta is None:
        rd = relative_density(E, Lebesgue(), L, default_delta_r, d=d)
        delta = 0.5 * rd.rho_hat
    if rule is None:
        spacing = min(min_feature_scale(E), radius) / 2.5
        rule = build_quadrature(d, 0, max_spacing=spacing)
    ind = membership(E, rule.nodes).astype(float)
    num_vals = rule.weights * ind
    num, den = _local_masses(net, rule, num_vals, rule.weights.copy(), radius, radius)
    if np.any(den <= 0.0):
        raise NetConstructionError("net caps too small for the rule resolution")

    # bounded-overlap certificate for the cover
    probe = fibonacci_lattice(4 * net.shape[0] + 1) if d == 2 else uniform_circle(4 * net.shape[0] + 1)
    tree = cKDTree(net)
    chord = 2.0 * math.sin(min(radius, math.pi) / 2.0)
    counts = tree.query_ball_point(probe, r=chord, return_length=True)
    if int(np.max(counts)) > overlap_cap:
        raise NetConstructionError(
            f"cover overlap {int(np.max(counts))} exceeds the bound {overlap_cap}"
        )

    good = num >= delta * den
    if not good.any():
        return EmptySet()
    return CapUnion(net[good], np.full(int(good.sum()), radius))
