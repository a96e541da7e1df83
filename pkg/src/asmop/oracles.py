"""Brute-force reference computations used by the self-test and test suite.

Nothing here shares code with the solvers it is meant to check.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

# grid resolution per number of objectives, keeping each grid near 10^3 points
GRID_STEPS = {1: 1, 2: 1000, 3: 50, 4: 20}


def simplex_grid(q, m):
    """All weight vectors with entries in ``{0, 1/m, ..., 1}`` summing to one."""
    pts = []
    for bars in combinations(range(m + q - 1), q - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(m + q - 2 - prev)
        pts.append(parts)
    return np.array(pts, dtype=float) / m


def grid_min_norm(gradients, final_step=1e-12, starts=3):
    """Minimum of ``||sum_i lam_i g_i||`` over the simplex.

    Exhaustive grid, then pairwise-exchange pattern search from the best grid
    points with step halving down to ``final_step``.
    """
    G = np.atleast_2d(np.asarray(gradients, dtype=float))
    q = len(G)
    if q == 1:
        return float(np.linalg.norm(G[0]))
    m = GRID_STEPS.get(q, 10)
    W = simplex_grid(q, m)
    vals = np.einsum("ij,ij->i", W @ G, W @ G)
    order = np.argsort(vals)[:starts]
    pairs = [(i, j) for i in range(q) for j in range(q) if i != j]
    best = np.inf
    for s in order:
        lam = W[s].copy()
        f = vals[s]
        h = 1.0 / m
        while h >= final_step:
            for _ in range(200):
                cands = []
                for i, j in pairs:
                    t = min(h, lam[i])
                    if t <= 0:
                        continue
                    c = lam.copy()
                    c[i] -= t
                    c[j] += t
                    cands.append(c)
                if not cands:
                    break
                C = np.array(cands)
                cv = np.einsum("ij,ij->i", C @ G, C @ G)
                k = int(np.argmin(cv))
                if cv[k] < f:
                    lam, f = C[k], cv[k]
                else:
                    break
            h /= 2
        best = min(best, f)
    return float(np.sqrt(max(best, 0.0)))


def brute_force_nondominated(F):
    """Indices of rows not dominated by any other row (O(m^2) double loop)."""
    F = [tuple(map(float, f)) for f in F]
    keep = []
    for j, v in enumerate(F):
        dominated = False
        for i, u in enumerate(F):
            if i != j and all(a <= b for a, b in zip(u, v)) and any(a < b for a, b in zip(u, v)):
                dominated = True
                break
        if not dominated:
            keep.append(j)
    return keep


def central_difference_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def power_iteration_norm(H, iters=200, seed=0):
    v = np.random.default_rng(seed).standard_normal(len(H))
    lam = 0.0
    for _ in range(iters):
        w = H @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        lam = nrm
    return float(lam)


def segment_distance(x, a, b):
    """Euclidean distance from ``x`` to the segment ``[a, b]``."""
    x, a, b = (np.asarray(v, dtype=float) for v in (x, a, b))
    ab = b - a
    t = np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
    return float(np.linalg.norm(x - (a + t * ab)))
