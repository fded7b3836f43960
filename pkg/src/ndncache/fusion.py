"""PCA fusion of router features into cache weights, and weight-to-capacity rounding.

The feature table has one row per router and three columns: betweenness,
estimated pending Interests and estimated Content Store hits. Columns are
normalized, their covariance is computed, and the dominant eigenvector
(found by power iteration) provides the mixing coefficients that collapse
each row into one importance score.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FusionError",
    "PrincipalComponents",
    "FusionResult",
    "feature_matrix",
    "normalize",
    "covariance",
    "first_eigenvector",
    "fuse",
    "weights",
    "allocate",
    "uniform_weights",
    "degree_weights",
    "proposed_weights",
    "allocation_to_csv",
    "write_allocation",
]

FUSED_FLOOR = 0.01
POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
RESIDUAL_TOL = 1e-8
ZERO_TOL = 1e-12


class FusionError(ValueError):
    pass


def feature_matrix(records):
    """``(router_ids, X)`` from feature records, X of shape (I, 3)."""
    ids = [r.router for r in records]
    X = np.array([[r.bc, r.estimated_pi, r.estimated_hi] for r in records], dtype=np.float64)
    return ids, X.reshape(len(ids), 3)


def normalize(X, mode="minmax"):
    """Column-wise normalization; constant columns become zeros.

    Parameters
    ----------
    X : array_like, shape (I, J)
    mode : {"minmax", "zscore"}
        ``zscore`` uses the population standard deviation.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise FusionError("feature matrix must be two-dimensional")
    if X.shape[0] < 2:
        raise FusionError("need at least two routers to normalize")
    out = np.zeros_like(X)
    for j in range(X.shape[1]):
        col = X[:, j]
        lo, hi = col.min(), col.max()
        if hi - lo <= ZERO_TOL * max(1.0, abs(hi), abs(lo)):
            continue
        if mode == "minmax":
            out[:, j] = (col - lo) / (hi - lo)
        elif mode == "zscore":
            out[:, j] = (col - col.mean()) / col.std()
        else:
            raise FusionError(f"unknown normalization mode {mode!r}")
    return out


def covariance(X):
    """Population covariance of the columns of ``X`` (columns are centered first)."""
    X = np.asarray(X, dtype=np.float64)
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / X.shape[0]
    return (cov + cov.T) / 2


@dataclass(frozen=True)
class PrincipalComponents:
    pc: tuple  # mixing coefficients, non-negative, summing to 1
    eigenvalue: float
    vector: tuple  # unit eigenvector, sign fixed
    residual: float
    iterations: int
    degenerate: bool = False
    method: str = "power"


def first_eigenvector(cov, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Dominant eigenpair of a symmetric PSD matrix by power iteration.

    Starts from the normalized all-ones vector. The returned ``pc`` is the
    eigenvector with its sign chosen so the components sum positive, negative
    components clamped to zero and the rest rescaled to sum to one.
    Components whose magnitude is below ``tol`` are treated as zero.

    If the iteration does not settle within ``max_iter`` steps (nearly tied
    leading eigenvalues), the eigenpair is taken from ``numpy.linalg.eigh``
    and ``method`` is set to ``"eigh"``. An all-zero matrix returns
    ``degenerate=True``.
    """
    C = np.asarray(cov, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise FusionError("covariance must be square")
    if not np.allclose(C, C.T, rtol=0, atol=1e-12 * max(1.0, np.abs(C).max(initial=0.0))):
        raise FusionError("covariance must be symmetric")
    n = C.shape[0]
    if np.abs(C).max(initial=0.0) <= ZERO_TOL:
        return PrincipalComponents((1.0 / n,) * n, 0.0, (0.0,) * n, 0.0, 0, degenerate=True)

    v, it, converged = _power(C, np.ones(n) / math.sqrt(n), tol, max_iter)
    method = "power"
    if converged:
        # a start vector orthogonal to the dominant eigenspace settles on a lesser pair
        lam = float(v @ C @ v)
        deflated = C - lam * np.outer(v, v)
        for e in np.eye(n):
            u, _, _ = _power(deflated, e, tol, max_iter)
            if float(u @ deflated @ u) > lam * (1 + 1e-9) + ZERO_TOL:
                v, extra, converged = _power(C, u, tol, max_iter)
                it += extra
                break
    if converged and _residual(C, v) > RESIDUAL_TOL:
        # the step-size test can stop early on large matrices with a small gap
        v, it, converged = _polish(C, v, it, max_iter)
    if not converged:
        method = "eigh"
        vals, vecs = np.linalg.eigh(C)
        v = vecs[:, -1]

    v = np.where(np.abs(v) < tol, 0.0, v)
    v /= np.linalg.norm(v)
    lam = float(v @ C @ v)
    residual = _residual(C, v)
    if residual > RESIDUAL_TOL * max(1.0, abs(lam)):
        raise FusionError(f"eigenvector residual {residual:.3g} exceeds tolerance")

    total = v.sum()
    if total < 0 or (abs(total) <= ZERO_TOL and v[np.argmax(np.abs(v))] < 0):
        v = -v
    pos = np.clip(v, 0.0, None)
    pc = pos / pos.sum()
    return PrincipalComponents(tuple(pc.tolist()), lam, tuple(v.tolist()), residual, it, method=method)


def _power(C, v, tol, max_iter):
    """Plain power iteration; returns (unit vector, iterations, converged)."""
    v = np.asarray(v, dtype=np.float64)
    v = v / np.linalg.norm(v)
    for it in range(1, max_iter + 1):
        w = C @ v
        norm = np.linalg.norm(w)
        if norm <= ZERO_TOL:
            return v, it, True  # v lies in the null space
        w /= norm
        if np.abs(w - v).max() < tol:
            return w, it, True
        v = w
    return v, max_iter, False


def _residual(C, v):
    lam = float(v @ C @ v)
    return float(np.abs(C @ v - lam * v).max())


def _polish(C, v, it, max_iter):
    """Keep iterating until the absolute eigen residual meets ``RESIDUAL_TOL``."""
    while it < max_iter:
        w = C @ v
        v = w / np.linalg.norm(w)
        it += 1
        if _residual(C, v) <= RESIDUAL_TOL / 10:
            return v, it, True
    return v, it, False


def fuse(X, pc):
    """Project each row of the normalized features onto the mixing coefficients."""
    X = np.asarray(X, dtype=np.float64)
    coeffs = np.asarray(pc.pc if isinstance(pc, PrincipalComponents) else pc, dtype=np.float64)
    if isinstance(pc, PrincipalComponents) and pc.degenerate:
        raise FusionError("cannot fuse with degenerate principal components")
    if X.shape[-1] != coeffs.shape[0]:
        raise FusionError(f"dimension mismatch: {X.shape[-1]} features vs {coeffs.shape[0]} components")
    return X @ coeffs


def weights(F, floor=FUSED_FLOOR):
    """Proportional weights after raising every fused value to at least ``floor``."""
    F = np.maximum(np.asarray(F, dtype=np.float64), floor)
    return F / F.sum()


def allocate(w, total):
    """Round ``total * w`` to integer capacities summing exactly to ``total``.

    Every router is first given ``max(1, floor(total * w_i))`` chunks. Leftover
    chunks go to the largest fractional remainders; an overshoot caused by the
    one-chunk minimum is taken back from the most over-provisioned routers.

    Parameters
    ----------
    w : array_like
        Non-negative weights (renormalized if they do not sum to one).
    total : int
        Network cache budget in chunks; must be at least ``len(w)``.

    Returns
    -------
    numpy.ndarray of int
    """
    w = np.asarray(w, dtype=np.float64)
    n = len(w)
    total = int(total)
    if n == 0:
        raise FusionError("no routers to allocate")
    if total < n:
        raise FusionError(f"budget {total} smaller than router count {n}")
    if (w < 0).any() or w.sum() <= 0:
        raise FusionError("weights must be non-negative with positive sum")
    w = w / w.sum()
    quota = total * w
    floors = np.floor(quota).astype(np.int64)
    cap = np.maximum(floors, 1)
    left = total - int(cap.sum())
    if left > 0:
        frac = quota - floors
        eligible = [i for i in range(n) if floors[i] >= 1 or quota[i] >= 1]
        order = sorted(eligible, key=lambda i: (-frac[i], -w[i], i))
        for i in order[:left]:
            cap[i] += 1
    while left < 0:
        excess = cap - quota
        candidates = [i for i in range(n) if cap[i] > 1]
        i = max(candidates, key=lambda i: (excess[i], -w[i], -i))
        cap[i] -= 1
        left += 1
    return cap


def uniform_weights(n):
    if n < 1:
        raise FusionError("need at least one router")
    return np.full(n, 1.0 / n)


def degree_weights(centrality):
    """Weights proportional to degree; ``centrality`` is a mapping or sequence."""
    vals = np.asarray(
        [centrality[k] for k in sorted(centrality)] if isinstance(centrality, dict) else centrality,
        dtype=np.float64,
    )
    if (vals < 1).any():
        raise FusionError("degrees must be >= 1")
    return vals / vals.sum()


@dataclass(frozen=True)
class FusionResult:
    routers: list
    weights: np.ndarray
    normalized: np.ndarray
    components: PrincipalComponents
    fused: np.ndarray | None


def proposed_weights(records, mode="minmax", floor=FUSED_FLOOR):
    """Full fusion pipeline from raw feature records to router weights.

    Falls back to uniform weights when every router has identical features.
    """
    ids, X = feature_matrix(records)
    Xn = normalize(X, mode)
    pcs = first_eigenvector(covariance(Xn))
    if pcs.degenerate:
        return FusionResult(ids, uniform_weights(len(ids)), Xn, pcs, None)
    F = fuse(Xn, pcs)
    return FusionResult(ids, weights(F, floor), Xn, pcs, F)


def allocation_to_csv(router_ids, w, capacities):
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(("router_id", "weight", "capacity_chunks"))
    for r, wi, c in zip(router_ids, w, capacities):
        out.writerow((r, format(float(wi), ".9g"), int(c)))
    return buf.getvalue()


def write_allocation(path, router_ids, w, capacities):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(allocation_to_csv(router_ids, w, capacities))
