"""Marginal function via the minimum-norm point of the gradients' convex hull.

``omega(x) = -min_{||d|| <= 1} max_i <g_i, d>`` equals the norm of the
min-norm element ``gbar = sum_i lam_i g_i`` over the unit simplex, and the
minimizing direction is ``-gbar / ||gbar||``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InputError, NumericError

# Exhaustive face search is exact and cheap up to this many objectives.
MAX_ENUMERATED = 8
ROUNDING_FLOOR = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class MarginalResult:
    omega: float
    weights: np.ndarray
    direction: np.ndarray
    gap: float
    combination: np.ndarray  # gbar = sum_i weights[i] * g_i


def default_tol(q):
    return 1e-10 if q <= 2 else 1e-8


def project_simplex(v):
    """Euclidean projection onto ``{lam >= 0, sum(lam) = 1}``."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def _two_point(G):
    diff = G[0] - G[1]
    denom = float(diff @ diff)
    if denom == 0.0:
        return np.array([1.0, 0.0])
    lam = min(1.0, max(0.0, float((G[1] - G[0]) @ G[1]) / denom))
    return np.array([lam, 1.0 - lam])


def _affine_min_norm(Gs):
    """Min-norm point of the affine hull of the rows of ``Gs``; weights may be negative."""
    m = len(Gs)
    K = np.zeros((m + 1, m + 1))
    K[:m, :m] = Gs @ Gs.T
    K[:m, m] = 1.0
    K[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:m]


def _enumerate_faces(G):
    q, n = G.shape
    best, best_val = None, np.inf
    for size in range(1, min(q, n + 1) + 1):
        for S in combinations(range(q), size):
            mu = _affine_min_norm(G[list(S)])
            if mu.min() < -1e-12:
                continue
            mu = np.maximum(mu, 0.0)
            mu /= mu.sum()
            lam = np.zeros(q)
            lam[list(S)] = mu
            gb = lam @ G
            val = float(gb @ gb)
            if val < best_val * (1 - 1e-12):
                best, best_val = lam, val
    return best


def _projected_gradient(G, tol, max_iter):
    q = len(G)
    GG = G @ G.T
    L = max(float(np.linalg.eigvalsh(GG)[-1]), 1e-300)
    lam = np.full(q, 1.0 / q)
    y, t = lam.copy(), 1.0
    for _ in range(max_iter):
        grad = GG @ lam
        if float(lam @ grad - grad.min()) <= tol:
            break
        new = project_simplex(y - GG @ y / L)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = new + (t - 1.0) / t_new * (new - lam)
        lam, t = new, t_new
    # polish on the identified support
    S = np.flatnonzero(lam > 1e-12)
    mu = _affine_min_norm(G[S])
    if mu.min() >= 0:
        cand = np.zeros(q)
        cand[S] = mu / mu.sum()
        if np.linalg.norm(cand @ G) <= np.linalg.norm(lam @ G):
            lam = cand
    return lam


def min_norm_point(gradients, tol=None):
    try:
        G = np.atleast_2d(np.asarray(gradients, dtype=float))
    except ValueError as exc:
        raise InputError(f"gradients must share one dimension: {exc}") from None
    if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < 1:
        raise InputError("gradients must form a nonempty (q, n) array")
    if not np.all(np.isfinite(G)):
        raise NumericError("non-finite gradient passed to min_norm_point")
    q, n = G.shape
    tol = default_tol(q) if tol is None else tol
    if tol <= 0:
        raise InputError("tol must be positive")

    if q == 1:
        lam = np.ones(1)
    elif q == 2:
        lam = _two_point(G)
    elif q <= MAX_ENUMERATED:
        lam = _enumerate_faces(G)
    else:
        lam = _projected_gradient(G, tol, 10 * q * n)

    gbar = lam @ G
    omega = float(np.linalg.norm(gbar))
    # below the rounding floor of the combination the direction is noise
    if omega <= ROUNDING_FLOOR * float(np.abs(G).max()):
        gbar = np.zeros(n)
        omega = 0.0
    if omega == 0.0:
        return MarginalResult(0.0, lam, np.zeros(n), 0.0, gbar)
    d = -gbar / omega
    gap = max(0.0, float((G @ d).max()) + omega)
    return MarginalResult(omega, lam, d, gap, gbar)


def marginal_true(problem, x, tol=None):
    """Marginal function with full-sample gradients (charges ``problem.meter``)."""
    full = problem.full_indices()
    grads = [problem.evaluate(i, x, full)[1] for i in range(problem.q)]
    return min_norm_point(grads, tol)


def marginal_subsampled(problem, x, samples, tol=None):
    if len(samples) != problem.q:
        raise InputError(f"expected {problem.q} index multisets, got {len(samples)}")
    grads = [problem.evaluate(i, x, idx)[1] for i, idx in enumerate(samples)]
    return min_norm_point(grads, tol)
