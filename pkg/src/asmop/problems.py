"""Finite-sum multi-objective problems and the scalar-product cost meter.

A problem holds ``q`` components; component ``i`` is an average of ``N``
per-sample functions ``f^i_j``.  Sample indices are 0-based throughout.

Cost model: evaluating a per-sample value at a point where its inner
product is not cached costs one scalar product; the gradient reuses that
inner product for free.  Forming a subsampled Hessian is charged one
scalar product per distinct sample (one per-sample Hessian-vector
product).  Each component caches inner products for the few most recently
visited points, so re-evaluating at ``x_k`` after a rejected step is free.
"""

from __future__ import annotations

import csv
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import InputError, NumericError

_CACHE_POINTS = 4


class CostMeter:
    """Thread-safe counter of n-dimensional scalar products."""

    def __init__(self, start=0):
        self._count = int(start)
        self._lock = threading.Lock()

    def add(self, k):
        if k < 0:
            raise ValueError("cost increments must be nonnegative")
        with self._lock:
            self._count += int(k)

    @property
    def scalar_products(self):
        return self._count

    def __repr__(self):
        return f"CostMeter({self._count})"


class Component:
    """One finite-sum objective ``f^i = (1/N) sum_j f^i_j``.

    Subclasses provide a per-sample "inner" quantity (the one scalar product
    a sample needs at a point) and the value/gradient/Hessian formulas built
    on top of it.
    """

    N: int
    n: int
    c_h: float
    kind = "generic"

    def inner(self, x, idx):
        raise NotImplementedError

    def values(self, x, idx, s):
        raise NotImplementedError

    def gradients(self, x, idx, s):
        raise NotImplementedError

    def hessian(self, x, idx, s):
        """Average of per-sample Hessians over ``idx`` (with multiplicity)."""
        raise NotImplementedError

    def sample_hessian(self, x, j):
        idx = np.array([j])
        return self.hessian(x, idx, self.inner(x, idx))


class LinearModelComponent(Component):
    """Loss of the linear predictor ``a_j . x`` plus an optional ridge term.

    The last coordinate is the intercept and is excluded from the ridge.
    """

    def __init__(self, features, labels, ridge=0.0, loss="logistic"):
        A = np.asarray(features, dtype=float)
        y = np.asarray(labels, dtype=float)
        if A.ndim != 2:
            raise InputError("features must be a 2-D array (N, n)")
        if y.shape != (A.shape[0],):
            raise InputError(f"labels must have shape ({A.shape[0]},), got {y.shape}")
        if A.shape[0] < 1:
            raise InputError("a component needs at least one sample")
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(y)):
            raise InputError("features and labels must be finite")
        if loss not in ("logistic", "least-squares"):
            raise InputError(f"unknown loss {loss!r}")
        if loss == "logistic" and not np.all(np.isin(y, (-1.0, 1.0))):
            bad = int(np.flatnonzero(~np.isin(y, (-1.0, 1.0)))[0])
            raise InputError(f"logistic labels must be in {{-1, +1}} (sample {bad} has {y[bad]!r})")
        if ridge < 0:
            raise InputError("ridge parameter must be nonnegative")
        self.A = A
        self.y = y
        self.ridge = float(ridge)
        self.loss = loss
        self.kind = loss
        self.N, self.n = A.shape
        self._mask = np.ones(self.n)
        self._mask[-1] = 0.0
        row_sq = np.einsum("ij,ij->i", A, A)
        curv = 0.25 if loss == "logistic" else 1.0
        self.c_h = curv * float(row_sq.max()) + self.ridge

    def inner(self, x, idx):
        return self.A[idx] @ x

    def _ridge_value(self, x):
        xh = x * self._mask
        return 0.5 * self.ridge * float(xh @ xh)

    def values(self, x, idx, s):
        y = self.y[idx]
        if self.loss == "logistic":
            base = np.logaddexp(0.0, -y * s)
        else:
            base = 0.5 * (s - y) ** 2
        return base + self._ridge_value(x)

    def gradients(self, x, idx, s):
        y = self.y[idx]
        if self.loss == "logistic":
            coef = -y * expit(-y * s)
        else:
            coef = s - y
        return coef[:, None] * self.A[idx] + self.ridge * (x * self._mask)

    def hessian(self, x, idx, s):
        Ai = self.A[idx]
        if self.loss == "logistic":
            p = expit(s)
            w = p * (1.0 - p)
        else:
            w = np.ones(len(idx))
        H = (Ai * w[:, None]).T @ Ai / len(idx)
        H[np.diag_indices(self.n)] += self.ridge * self._mask
        return H


class QuadraticComponent(Component):
    """Per-sample quadratics ``1/2 (x - c_j)^T Q (x - c_j)``."""

    kind = "quadratic"

    def __init__(self, centers, curvature=None):
        C = np.atleast_2d(np.asarray(centers, dtype=float))
        self.centers = C
        self.N, self.n = C.shape
        Q = np.eye(self.n) if curvature is None else np.asarray(curvature, dtype=float)
        if Q.shape != (self.n, self.n) or not np.allclose(Q, Q.T):
            raise InputError("curvature must be a symmetric (n, n) matrix")
        self.Q = Q
        self.c_h = float(np.linalg.norm(Q, 2))

    def inner(self, x, idx):
        r = x - self.centers[idx]
        return np.einsum("ij,jk,ik->i", r, self.Q, r)

    def values(self, x, idx, s):
        return 0.5 * s

    def gradients(self, x, idx, s):
        return (x - self.centers[idx]) @ self.Q

    def hessian(self, x, idx, s):
        return self.Q.copy()


class MultiObjectiveProblem:
    """``q`` finite-sum components sharing dimension ``n`` and sample count ``N``."""

    def __init__(self, components, meter=None, name="problem"):
        components = list(components)
        if not components:
            raise InputError("a problem needs at least one component")
        n = {c.n for c in components}
        N = {c.N for c in components}
        if len(n) != 1:
            raise InputError(f"components disagree on dimension: {sorted(n)}")
        if len(N) != 1:
            raise InputError(f"components must share the sample count N, got {sorted(N)}")
        self.components = components
        self.q = len(components)
        self.n = n.pop()
        self.N = N.pop()
        self.c_h = max(c.c_h for c in components)
        self.meter = meter if meter is not None else CostMeter()
        self.name = name
        self._caches = [OrderedDict() for _ in components]
        self._full = np.arange(self.N)

    def with_meter(self, meter=None):
        """Same data, a separate meter and an empty cache (for diagnostics)."""
        return MultiObjectiveProblem(self.components, meter=meter or CostMeter(), name=self.name)

    def full_indices(self):
        return self._full

    def check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise InputError(f"point must have shape ({self.n},), got {x.shape}")
        return x

    def check_indices(self, idx):
        idx = np.asarray(idx)
        if idx.ndim != 1 or idx.size == 0:
            raise InputError("sample indices must be a nonempty 1-D sequence")
        if not np.issubdtype(idx.dtype, np.integer):
            raise InputError("sample indices must be integers")
        if idx.min() < 0 or idx.max() >= self.N:
            raise InputError(f"sample index out of range [0, {self.N})")
        return idx

    def _inner(self, i, x, idx):
        cache = self._caches[i]
        key = x.tobytes()
        stored = cache.get(key)
        if stored is None:
            stored = np.full(self.N, np.nan)
            cache[key] = stored
            if len(cache) > _CACHE_POINTS:
                cache.popitem(last=False)
        else:
            cache.move_to_end(key)
        s = stored[idx]
        missing = np.isnan(s)
        if missing.any():
            todo = np.unique(idx[missing])
            stored[todo] = self.components[i].inner(x, todo)
            self.meter.add(len(todo))
            s = stored[idx]
        return s

    def _checked(self, i, idx, per_sample):
        bad = ~np.isfinite(per_sample)
        if bad.any():
            row = int(np.flatnonzero(bad.reshape(len(idx), -1).any(axis=1))[0])
            j = int(idx[row])
            raise NumericError(f"non-finite value in component {i}, sample {j}", component=i, sample=j)

    def evaluate(self, i, x, idx, gradient=True):
        """Subsampled value (and gradient) of component ``i`` over the multiset ``idx``."""
        x = self.check_point(x)
        idx = self.check_indices(idx)
        comp = self.components[i]
        s = self._inner(i, x, idx)
        vals = comp.values(x, idx, s)
        self._checked(i, idx, vals)
        if not gradient:
            return float(vals.mean())
        grads = comp.gradients(x, idx, s)
        self._checked(i, idx, grads)
        return float(vals.mean()), grads.mean(axis=0)

    def value(self, i, x, idx):
        return self.evaluate(i, x, idx, gradient=False)

    def hessian(self, i, x, idx):
        x = self.check_point(x)
        idx = self.check_indices(idx)
        s = self._inner(i, x, idx)
        self.meter.add(len(np.unique(idx)))
        return self.components[i].hessian(x, idx, s)

    def objectives(self, x):
        """Full-sample objective vector ``(f^1(x), ..., f^q(x))``."""
        return np.array([self.value(i, x, self._full) for i in range(self.q)])

    def phi(self, x):
        return float(self.objectives(x).max())

    def phi_fix(self, x):
        """Average over samples of the per-sample max across components."""
        x = self.check_point(x)
        per = np.stack([c.values(x, self._full, self._inner(i, x, self._full))
                        for i, c in enumerate(self.components)])
        return float(per.max(axis=0).mean())


def eval_component_subsampled(problem, i, indices, x):
    """Average value and gradient of ``f^i_j`` over a multiset of samples."""
    if not 0 <= i < problem.q:
        raise InputError(f"component index {i} out of range")
    return problem.evaluate(i, x, indices)


def scalarize(problem, x, samples):
    """Max over components of the subsampled values."""
    if len(samples) != problem.q:
        raise InputError(f"expected {problem.q} index multisets, got {len(samples)}")
    return max(problem.value(i, x, idx) for i, idx in enumerate(samples))


def make_logistic_problem(features, labels, ridge, name="logistic"):
    """Regularized logistic regression, one dataset per component."""
    if not (len(features) == len(labels) == len(ridge)):
        raise InputError("features, labels and ridge need one entry per component")
    comps = [LinearModelComponent(A, y, lam, "logistic") for A, y, lam in zip(features, labels, ridge)]
    return MultiObjectiveProblem(comps, name=name)


def make_least_squares_problem(features, labels, ridge=None, name="least-squares"):
    ridge = [0.0] * len(features) if ridge is None else ridge
    if not (len(features) == len(labels) == len(ridge)):
        raise InputError("features, labels and ridge need one entry per component")
    comps = [LinearModelComponent(A, y, lam, "least-squares") for A, y, lam in zip(features, labels, ridge)]
    return MultiObjectiveProblem(comps, name=name)


def make_mixed_problem(logistic_data, least_squares_data, ridge=0.01, name="mixed"):
    """Logistic component first, least-squares second."""
    comps = [
        LinearModelComponent(*logistic_data, ridge=ridge, loss="logistic"),
        LinearModelComponent(*least_squares_data, ridge=0.0, loss="least-squares"),
    ]
    return MultiObjectiveProblem(comps, name=name)


def make_quadratic_problem(centers, curvature=None, name="quadratic"):
    """Component ``i`` averages ``1/2 ||x - c||^2`` over the rows of ``centers[i]``."""
    comps = [QuadraticComponent(C, curvature) for C in centers]
    return MultiObjectiveProblem(comps, name=name)


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray


def make_synthetic_classification(n, N, q, seed, separation=1.0):
    """Two Gaussian blobs per component, balanced labels, trailing intercept column."""
    if n < 2:
        raise InputError("n must be at least 2 (features plus intercept)")
    if N < 10:
        raise InputError("N must be at least 10")
    if q < 1:
        raise InputError("q must be at least 1")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(q):
        u = rng.standard_normal(n - 1)
        u /= np.linalg.norm(u)
        y = np.where(np.arange(N) < N // 2, 1.0, -1.0)
        rng.shuffle(y)
        X = 0.5 * separation * y[:, None] * u + rng.standard_normal((N, n - 1))
        A = np.hstack([X, np.ones((N, 1))])
        out.append(Dataset(A, y))
    return out


def load_csv_dataset(path):
    """Read ``n-1`` feature columns then a label column; append the intercept."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                if lineno == 1 and not rows:
                    continue  # header
                raise InputError(f"{path}:{lineno}: non-numeric field") from None
    if not rows:
        raise InputError(f"{path}: no samples")
    width = {len(r) for r in rows}
    if len(width) != 1 or width.pop() < 2:
        raise InputError(f"{path}: rows need the same number (>= 2) of columns")
    data = np.array(rows)
    A = np.hstack([data[:, :-1], np.ones((len(data), 1))])
    return Dataset(A, data[:, -1])
