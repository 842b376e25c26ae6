"""Concentration of polynomial mass on subsets: Gram/concentration matrices,
exact L^2 best constants via a generalized symmetric eigenproblem, L^p and
sup-norm ratio estimation, and the spectral-tail uncertainty ratio.

The best L^2 comparison constant over Pi_L is 1/lambda_min of the pencil
(G_E, G_full), where G_X is the quadratic form Q -> integral_X |Q|^2 dmu in an
orthonormal basis.  lambda_min is computed from half-factors: a streamed QR of
the weighted basis rows gives triangular R_E, R_full with G_X = R_X^T R_X, and
lambda_min = sigma_min(R_E R_full^{-1})^2.  Going through singular values of
the factor instead of eigenvalues of the assembled Gram keeps tiny
concentrations resolvable down to roughly 1e-30 instead of the 1e-16
eigensolver floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .basis import BasisSpec, basis_dim, basis_matrix
from .errors import DegenerateMeasureError, EmptyIntersectionError, ResourceLimitError
from .measures import Lebesgue, MeasureSpec, weight_values
from .quadrature import QuadratureRule, build_quadrature
from .sets import FullSphere, SetSpec, arc_list, membership, min_feature_scale

__all__ = [
    "ConcentrationReport",
    "PnormReport",
    "gram_matrix",
    "lambda_min",
    "lp_ratio",
    "worst_case_lp",
    "uncertainty_check",
    "sup_norm_ratio",
    "sup_norm_ratios",
    "default_rule",
    "DEFAULT_MAX_DIM",
]

DEFAULT_MAX_DIM = 1089
_NODE_CHUNK = 8192
_QR_BLOCK = 49152
# node spacing as a fraction of the smallest set feature when indicators are involved
_SPACING_FRACTION = 2.5


@dataclass(frozen=True, eq=False)
class ConcentrationReport:
    """Smallest concentration eigenvalue with its extremal polynomial."""

    lambda_min: float
    best_c2: float
    witness: np.ndarray
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class PnormReport:
    """Best found L^p mass ratio (upper bound on the true minimum) with witness."""

    value: float
    witness: np.ndarray
    restarts: tuple
    seed: int


def _check_dim(spec: BasisSpec, max_dim: int) -> int:
    N = basis_dim(spec)
    if N > max_dim:
        raise ResourceLimitError(
            f"dim Pi_L = {N} exceeds the configured cap {max_dim}; raise max_dim to proceed"
        )
    return N


def default_rule(E: SetSpec, d: int, L: int, oversample: float = 4.0,
                 exact_degree: int | None = None, max_nodes: int | None = None) -> QuadratureRule:
    """Rule sized for degree-2L products and fine enough to resolve E's features."""
    if exact_degree is None:
        exact_degree = 2 * L
    spacing = min_feature_scale(E) / _SPACING_FRACTION
    kwargs = {} if max_nodes is None else {"max_nodes": max_nodes}
    return build_quadrature(d, exact_degree, oversample=oversample, max_spacing=spacing, **kwargs)


def _is_exact_case(E: SetSpec, mu: MeasureSpec, d: int) -> bool:
    if d != 1 or not isinstance(mu, Lebesgue):
        return False
    try:
        arc_list(E)
    except (TypeError, ValueError):
        return False
    return True


# -- exact trigonometric Gram over arc unions (d=1, Lebesgue) ------------------

def _arc_gram(arcs: list[tuple[float, float]], L: int) -> np.ndarray:
    """Gram of the trigonometric basis over a disjoint arc union, by antiderivatives."""
    N = 2 * L + 1
    G = np.zeros((N, N))
    if not arcs or L < 0:
        return G

    def dS(m, a, b):
        # integral of cos(m t): sin(m t)/m, with the m=0 limit t
        m = np.asarray(m, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (np.sin(m * b) - np.sin(m * a)) / m
        return np.where(m == 0, b - a, out)

    def dC(m, a, b):
        # integral of sin(m t): -cos(m t)/m, zero in the m=0 limit
        m = np.asarray(m, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (np.cos(m * a) - np.cos(m * b)) / m
        return np.where(m == 0, 0.0, out)

    k = np.arange(1, L + 1)
    J, K = np.meshgrid(k, k, indexing="ij")
    cos_idx = 2 * k - 1
    sin_idx = 2 * k
    for s, ln in arcs:
        a, b = s, s + ln
        G[0, 0] += (b - a) / (2.0 * math.pi)
        if L >= 1:
            c_norm = 1.0 / (math.sqrt(2.0 * math.pi) * math.sqrt(math.pi))
            G[0, cos_idx] += c_norm * dS(k, a, b)
            G[0, sin_idx] += c_norm * dC(k, a, b)
            half_pi = 0.5 / math.pi
            G[np.ix_(cos_idx, cos_idx)] += half_pi * (dS(J - K, a, b) + dS(J + K, a, b))
            G[np.ix_(sin_idx, sin_idx)] += half_pi * (dS(J - K, a, b) - dS(J + K, a, b))
            CS = half_pi * (dC(K - J, a, b) + dC(K + J, a, b))
            G[np.ix_(cos_idx, sin_idx)] += CS
    G[1:, 0] = G[0, 1:]
    if L >= 1:
        G[np.ix_(sin_idx, cos_idx)] = G[np.ix_(cos_idx, sin_idx)].T
    return 0.5 * (G + G.T)


# -- quadrature-path assembly ---------------------------------------------------

def _node_weights(mu: MeasureSpec, rule: QuadratureRule, chunk: slice) -> np.ndarray:
    return rule.weights[chunk] * weight_values(mu, rule.nodes[chunk])


def gram_matrix(
    E: SetSpec,
    mu: MeasureSpec,
    spec: BasisSpec,
    rule: QuadratureRule | None = None,
    method: str = "auto",
    max_dim: int = DEFAULT_MAX_DIM,
) -> np.ndarray:
    """Symmetric PSD matrix of integrals of Y_i Y_j over E against mu.

    ``method='auto'`` uses closed-form arc integration for d=1 with the plain
    surface measure (exact to rounding) and quadrature with indicator masks
    otherwise; 'quadrature' and 'exact' force the respective path.
    """
    N = _check_dim(spec, max_dim)
    if method not in ("auto", "quadrature", "exact"):
        raise ValueError(f"unknown method {method!r}")
    use_exact = method == "exact" or (method == "auto" and _is_exact_case(E, mu, spec.d))
    if method == "exact" and not _is_exact_case(E, mu, spec.d):
        raise ValueError("exact Gram assembly requires d=1 with the plain surface measure")
    if use_exact:
        return _arc_gram(arc_list(E), spec.L)
    if rule is None:
        rule = default_rule(E, spec.d, spec.L)
    mask = membership(E, rule.nodes)
    G = np.zeros((N, N))
    for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
        chunk = slice(i0, min(i0 + _NODE_CHUNK, rule.n_nodes))
        m = mask[chunk]
        if not m.any():
            continue
        a = _node_weights(mu, rule, chunk)[m]
        B = basis_matrix(spec, rule.nodes[chunk][m])
        G += (B * a[:, None]).T @ B
    return 0.5 * (G + G.T)


def _stream_factor(
    spec: BasisSpec,
    rule: QuadratureRule,
    mu: MeasureSpec,
    mask: np.ndarray | None,
) -> tuple[np.ndarray, int]:
    """Upper-triangular R with R^T R = sum over (masked) nodes of a * Y Y^T,
    built by blockwise QR so the Gram itself is never formed."""
    N = basis_dim(spec)
    R = None
    pending: list[np.ndarray] = []
    pending_rows = 0
    total_rows = 0

    def merge():
        nonlocal R, pending, pending_rows
        if not pending:
            return
        stack = pending if R is None else [R] + pending
        R = np.linalg.qr(np.vstack(stack), mode="r")
        pending = []
        pending_rows = 0

    for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
        chunk = slice(i0, min(i0 + _NODE_CHUNK, rule.n_nodes))
        a = _node_weights(mu, rule, chunk)
        if mask is not None:
            m = mask[chunk]
            if not m.any():
                continue
            pts = rule.nodes[chunk][m]
            a = a[m]
        else:
            pts = rule.nodes[chunk]
        rows = basis_matrix(spec, pts) * np.sqrt(a)[:, None]
        pending.append(rows)
        pending_rows += rows.shape[0]
        total_rows += rows.shape[0]
        if pending_rows >= _QR_BLOCK:
            merge()
    merge()
    if R is None:
        R = np.zeros((N, N))
    elif R.shape[0] < N:
        R = np.vstack([R, np.zeros((N - R.shape[0], N))])
    return R, total_rows


def lambda_min(
    E: SetSpec,
    mu: MeasureSpec,
    L: int,
    rule: QuadratureRule | None = None,
    d: int | None = None,
    method: str = "auto",
    max_dim: int = DEFAULT_MAX_DIM,
) -> ConcentrationReport:
    """Smallest eigenvalue of G_E x = lambda G_full x over Pi_L, with witness.

    For the plain surface measure with a rule exact to degree 2L the full
    Gram is the identity and the pencil reduces to a standard problem.
    """
    if d is None:
        if rule is None:
            raise ValueError("give either a rule or the sphere dimension d")
        d = rule.d
    spec = BasisSpec(d, L)
    N = _check_dim(spec, max_dim)

    if method not in ("auto", "quadrature", "exact"):
        raise ValueError(f"unknown method {method!r}")
    use_exact = method == "exact" or (method == "auto" and _is_exact_case(E, mu, d))
    if method == "exact" and not _is_exact_case(E, mu, d):
        raise ValueError("exact path requires d=1 with the plain surface measure")

    if use_exact:
        G = _arc_gram(arc_list(E), L)
        evals, evecs = scipy.linalg.eigh(G)
        lam = float(evals[0])
        witness = evecs[:, 0]
        resid = float(np.linalg.norm(G @ witness - lam * witness))
        diag = {"method": "exact-arcs", "residual": resid, "cond_full": 1.0}
        return ConcentrationReport(lam, _reciprocal(lam), witness, diag)

    if rule is None:
        rule = default_rule(E, d, L)
    if rule.exact_degree < 2 * L:
        raise ValueError("rule exactness must reach degree 2L for the polynomial part")

    mask = membership(E, rule.nodes)
    identity_full = isinstance(mu, Lebesgue)
    if identity_full:
        R_full = None
        cond_full = 1.0
    else:
        R_full, _ = _stream_factor(spec, rule, mu, mask=None)
        diag_full = np.abs(np.diag(R_full))
        if diag_full.min() <= 1e-14 * max(diag_full.max(), 1.0):
            raise DegenerateMeasureError("full-sphere Gram is numerically singular for this measure")
        s_full = np.linalg.svd(R_full, compute_uv=False)
        cond_full = float((s_full[0] / s_full[-1]) ** 2)

    R_E, n_masked = _stream_factor(spec, rule, mu, mask=mask)
    if R_full is None:
        T = R_E
    else:
        T = scipy.linalg.solve_triangular(R_full, R_E.T, trans="T", lower=False).T
    try:
        _, svals, Vt = np.linalg.svd(T)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigensolve did not converge (dim {N}, {n_masked} masked nodes): {exc}"
        ) from exc
    sigma = float(svals[-1])
    lam = sigma * sigma
    v = Vt[-1]
    if R_full is None:
        witness = v
    else:
        witness = scipy.linalg.solve_triangular(R_full, v, lower=False)
    nrm = np.linalg.norm(witness)
    if nrm > 0:
        witness = witness / nrm

    # residual of the pencil at the witness (assembled Grams, cheap at N^2)
    G_E = R_E.T @ R_E
    if R_full is None:
        resid = float(np.linalg.norm(G_E @ witness - lam * witness))
    else:
        G_full = R_full.T @ R_full
        resid = float(np.linalg.norm(G_E @ witness - lam * (G_full @ witness)))

    diag = {
        "method": "pencil-qr-svd",
        "residual": resid,
        "cond_full": cond_full,
        "n_nodes": rule.n_nodes,
        "n_masked": int(n_masked),
        "rule": dict(rule.descriptor),
    }
    return ConcentrationReport(lam, _reciprocal(lam), witness, diag)


def _reciprocal(lam: float) -> float:
    return 1.0 / lam if lam > 0 else math.inf


def lp_ratio(
    coeffs: np.ndarray,
    E: SetSpec,
    mu: MeasureSpec,
    p: float,
    spec: BasisSpec,
    rule: QuadratureRule | None = None,
) -> float:
    """Mass ratio integral_E |Q|^p dmu / integral |Q|^p dmu for Q given in basis coordinates."""
    if not (1.0 <= p < math.inf):
        raise ValueError("p must lie in [1, infinity)")
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (basis_dim(spec),):
        raise ValueError("coefficient vector has the wrong length")
    if not np.all(np.isfinite(c)) or np.linalg.norm(c) == 0.0:
        raise ValueError("zero or non-finite polynomial")
    if p == 2.0 and _is_exact_case(E, mu, spec.d):
        G_E = _arc_gram(arc_list(E), spec.L)
        return float(c @ G_E @ c) / float(c @ c)
    if rule is None:
        rule = default_rule(E, spec.d, spec.L)
    mask = membership(E, rule.nodes)
    num = 0.0
    den = 0.0
    for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
        chunk = slice(i0, min(i0 + _NODE_CHUNK, rule.n_nodes))
        a = _node_weights(mu, rule, chunk)
        vals = np.abs(basis_matrix(spec, rule.nodes[chunk]) @ c) ** p
        den += float(a @ vals)
        m = mask[chunk]
        if m.any():
            num += float((a * m) @ vals)
    if den == 0.0:
        raise ValueError("zero polynomial mass")
    return num / den


def _p2_objective(G_E, G_full):
    def fun(c):
        num = c @ G_E @ c
        den = c @ G_full @ c
        r = num / den
        grad = 2.0 * (G_E @ c - r * (G_full @ c)) / den
        return r, grad

    return fun


def _pnorm_objective(B, a_full, a_masked, p):
    def fun(c):
        v = B @ c
        av = np.abs(v)
        vp = av ** p
        num = a_masked @ vp
        den = a_full @ vp
        r = num / den
        dvp = p * av ** (p - 1.0) * np.sign(v)
        grad = (B.T @ (a_masked * dvp) - r * (B.T @ (a_full * dvp))) / den
        return r, grad

    return fun


def worst_case_lp(
    E: SetSpec,
    mu: MeasureSpec,
    L: int,
    p: float,
    restarts: int = 8,
    seed: int = 0,
    rule: QuadratureRule | None = None,
    d: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
    extra_starts: list | None = None,
) -> PnormReport:
    """Adversarial search for the least-concentrated polynomial at exponent p.

    Projected-descent (L-BFGS on the scale-invariant ratio) from structured
    starts -- the projection kernel peaked at the thinnest spot of E and a
    squared zonal peak -- plus seeded random coefficient vectors.  The result
    is an upper bound on the true minimum ratio; p = 2 is the certifiable case
    where it can be cross-checked against the eigensolver.
    """
    if not (1.0 <= p < math.inf):
        raise ValueError("p must lie in [1, infinity)")
    if d is None:
        if rule is None:
            raise ValueError("give either a rule or the sphere dimension d")
        d = rule.d
    spec = BasisSpec(d, L)
    N = _check_dim(spec, max_dim)
    if rule is None:
        rule = default_rule(E, d, L)
    mask = membership(E, rule.nodes)

    if p == 2.0:
        G_E = gram_matrix(E, mu, spec, rule)
        if _is_exact_case(E, mu, d):
            G_full = np.eye(N)
        else:
            G_full = gram_matrix(FullSphere(), mu, spec, rule, method="quadrature")
        objective = _p2_objective(G_E, G_full)
    else:
        if rule.n_nodes * N > 2 * 10**8:
            raise ResourceLimitError("p != 2 search needs the full evaluation matrix in memory")
        B = basis_matrix(spec, rule.nodes)
        a_full = rule.weights * weight_values(mu, rule.nodes)
        objective = _pnorm_objective(B, a_full, a_full * mask, p)

    rng = np.random.default_rng(seed)
    anchor = _thin_density_center(spec, rule, mask)
    starts = list(extra_starts or [])
    starts.append(_kernel_peak_start(spec, anchor))
    starts.append(_zonal_peak_start(spec, rule, anchor))
    while len(starts) < restarts:
        starts.append(rng.standard_normal(N))

    best_val = math.inf
    best_c = None
    finals = []
    for c0 in starts:
        c0 = np.asarray(c0, dtype=float)
        c0 = c0 / np.linalg.norm(c0)
        res = scipy.optimize.minimize(
            objective,
            c0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 2000, "gtol": 1e-12, "ftol": 1e-16},
        )
        val = float(res.fun)
        finals.append(val)
        if val < best_val:
            best_val = val
            best_c = res.x / np.linalg.norm(res.x)
    return PnormReport(value=best_val, witness=best_c, restarts=tuple(finals), seed=seed)


def _thin_density_center(spec: BasisSpec, rule: QuadratureRule, mask: np.ndarray) -> np.ndarray:
    """Argmin center of the local density of the set at scale 2/L, on a coarse
    candidate grid: the natural anchor for the peaked adversary starts."""
    from .geometry import candidate_centers

    if not mask.any() or mask.all():
        return rule.nodes[0]
    centers = candidate_centers(spec.d, spec.L, 4 * max(spec.L, 3))
    cos_r = math.cos(min(2.0 / max(spec.L, 1), math.pi))
    ind = mask.astype(float) * rule.weights
    num = np.zeros(centers.shape[0])
    for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
        D = centers @ rule.nodes[i0 : i0 + _NODE_CHUNK].T
        num += (D >= cos_r) @ ind[i0 : i0 + _NODE_CHUNK]
    return centers[int(np.argmin(num))]


def _kernel_peak_start(spec: BasisSpec, center: np.ndarray) -> np.ndarray:
    """Coefficients of the projection kernel centered at ``center``."""
    return basis_matrix(spec, center[None, :])[0]


def _zonal_peak_start(spec: BasisSpec, rule: QuadratureRule, center: np.ndarray) -> np.ndarray:
    """Squared zonal peak at ``center``, projected onto the basis (degree <= L)."""
    from .special import jacobi_eval, sphere_lambda

    half = max(1, spec.L // 2)
    lam = sphere_lambda(spec.d)
    t = np.clip(rule.nodes @ center, -1.0, 1.0)
    vals = jacobi_eval(half, 1.0 + lam, lam, t) ** 2
    coeffs = np.zeros(basis_dim(spec))
    for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
        chunk = slice(i0, min(i0 + _NODE_CHUNK, rule.n_nodes))
        B = basis_matrix(spec, rule.nodes[chunk])
        coeffs += B.T @ (rule.weights[chunk] * vals[chunk])
    return coeffs


def uncertainty_check(
    coeffs: np.ndarray,
    E: SetSpec,
    spec: BasisSpec,
    rule: QuadratureRule | None = None,
    tail_norm_sq: float = 0.0,
) -> float:
    """Ratio ||f||^2 / (integral_E |f_head|^2 dsigma + tail energy).

    ``coeffs`` holds the degree <= L part in basis coordinates; the spectral
    tail above degree L enters only through its total energy, so it is passed
    as a single nonnegative number (per-degree norms summed by the caller).
    """
    if tail_norm_sq < 0:
        raise ValueError("tail energy must be nonnegative")
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (basis_dim(spec),):
        raise ValueError("coefficient vector has the wrong length")
    head_sq = float(c @ c)
    if head_sq == 0.0 and tail_norm_sq == 0.0:
        raise ValueError("zero function")
    if head_sq == 0.0:
        return 1.0
    if rule is None:
        rule = default_rule(E, spec.d, spec.L)
    mask = membership(E, rule.nodes)
    mass_E = 0.0
    for i0 in range(0, rule.n_nodes, _NODE_CHUNK):
        chunk = slice(i0, min(i0 + _NODE_CHUNK, rule.n_nodes))
        m = mask[chunk]
        if not m.any():
            continue
        vals = basis_matrix(spec, rule.nodes[chunk][m]) @ c
        mass_E += float(rule.weights[chunk][m] @ (vals * vals))
    denom = mass_E + tail_norm_sq
    if denom == 0.0:
        raise ValueError("function vanishes on the set and has no spectral tail")
    return (head_sq + tail_norm_sq) / denom


def sup_norm_ratios(
    coeffs: np.ndarray,
    E: SetSpec,
    grid: np.ndarray,
    weight: MeasureSpec | None = None,
    spec: BasisSpec | None = None,
) -> np.ndarray:
    """Batched sup-norm ratios: one column of ``coeffs`` (dim x k) per polynomial.

    Evaluates the basis once per grid chunk, so scoring many random polynomials
    costs little more than scoring one.
    """
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    C = np.asarray(coeffs, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    if spec is None or C.shape[0] != basis_dim(spec):
        raise ValueError("coefficient columns must match the basis dimension")
    mask = membership(E, grid)
    if not mask.any():
        raise EmptyIntersectionError("no evaluation node lies inside the set")
    w = None
    if weight is not None and not isinstance(weight, Lebesgue):
        w = weight_values(weight, grid)
        if not np.all(np.isfinite(w)):
            raise ValueError("weight unbounded on the evaluation grid")
    top = np.zeros(C.shape[1])
    top_E = np.zeros(C.shape[1])
    for i0 in range(0, grid.shape[0], _NODE_CHUNK):
        sl = slice(i0, min(i0 + _NODE_CHUNK, grid.shape[0]))
        vals = np.abs(basis_matrix(spec, grid[sl]) @ C)
        if w is not None:
            vals *= w[sl][:, None]
        top = np.maximum(top, vals.max(axis=0))
        m = mask[sl]
        if m.any():
            top_E = np.maximum(top_E, vals[m].max(axis=0))
    if np.any(top == 0.0):
        raise ValueError("zero polynomial")
    return top_E / top


def sup_norm_ratio(
    Q,
    E: SetSpec,
    grid: np.ndarray,
    weight: MeasureSpec | None = None,
    spec: BasisSpec | None = None,
) -> float:
    """(max over grid nodes in E of |Q| w) / (max over all grid nodes of |Q| w).

    ``Q`` is either a callable on point arrays or a coefficient vector (then
    ``spec`` identifies the basis).  Raises if no grid node lands in E.
    """
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if callable(Q):
        vals = np.abs(np.asarray(Q(grid), dtype=float))
    else:
        if spec is None:
            raise ValueError("coefficient input needs the basis spec")
        c = np.asarray(Q, dtype=float)
        vals = np.empty(grid.shape[0])
        for i0 in range(0, grid.shape[0], _NODE_CHUNK):
            vals[i0 : i0 + _NODE_CHUNK] = np.abs(basis_matrix(spec, grid[i0 : i0 + _NODE_CHUNK]) @ c)
    if weight is not None and not isinstance(weight, Lebesgue):
        w = weight_values(weight, grid)
        if not np.all(np.isfinite(w)):
            raise ValueError("weight unbounded on the evaluation grid")
        vals = vals * w
    mask = membership(E, grid)
    if not mask.any():
        raise EmptyIntersectionError("no evaluation node lies inside the set")
    total = float(vals.max())
    if total == 0.0:
        raise ValueError("zero polynomial")
    return float(vals[mask].max()) / total
