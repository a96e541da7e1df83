"""Max-of-quadratics trust-region model and its Cauchy-type step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantError
from .problems import scalarize

HESSIAN_POLICIES = ("exact", "zero", "identity")
REFINE_POINTS = 16


@dataclass(frozen=True)
class QuadraticMaxModel:
    values: np.ndarray  # (q,)
    gradients: np.ndarray  # (q, n)
    hessians: np.ndarray  # (q, n, n)
    beta: float

    @property
    def q(self):
        return len(self.values)

    def component_values(self, d):
        d = np.asarray(d, dtype=float)
        curv = np.einsum("j,ijk,k->i", d, self.hessians, d)
        return self.values + self.gradients @ d + 0.5 * curv

    def __call__(self, d):
        return float(self.component_values(d).max())


def spectral_norm(H):
    return float(np.abs(np.linalg.eigvalsh(H)).max())


def clip_spectrum(H, bound):
    """Clamp the eigenvalues of symmetric ``H`` to ``[-bound, bound]``."""
    w, V = np.linalg.eigh(0.5 * (H + H.T))
    if np.abs(w).max() <= bound:
        return H
    w = np.clip(w, -bound, bound)
    return (V * w) @ V.T


def build_model(values, gradients, hessians, c_b=None):
    """Assemble the model; with ``c_b`` each Hessian is clipped to norm ``c_b - 1``."""
    values = np.asarray(values, dtype=float)
    gradients = np.atleast_2d(np.asarray(gradients, dtype=float))
    hessians = np.asarray(hessians, dtype=float)
    q, n = gradients.shape
    if values.shape != (q,) or hessians.shape != (q, n, n):
        raise InputError("model pieces have inconsistent shapes")
    if c_b is not None:
        if c_b < 1:
            raise InputError("c_b must be at least 1")
        hessians = np.stack([clip_spectrum(H, c_b - 1.0) for H in hessians])
    beta = 1.0 + max(spectral_norm(H) for H in hessians)
    return QuadraticMaxModel(values, gradients, hessians, beta)


def model_value(model, d):
    return model(d)


def refine_grid(delta):
    """Geometric grid ``delta * 2**-j`` on ``(0, delta]``; resolves short steps."""
    return delta * 0.5 ** np.arange(REFINE_POINTS)


def cauchy_step(model, omega, direction, delta, gap=0.0, refine=True):
    """Step along the marginal direction with guaranteed Cauchy decrease.

    Takes ``t = min(delta, omega / beta)`` along ``direction`` and, when
    ``refine`` is set, keeps the best of that and a geometric grid on
    ``(0, delta]``.  Returns ``(d, m(0) - m(d))``.
    """
    if delta <= 0:
        raise InputError("trust-region radius must be positive")
    direction = np.asarray(direction, dtype=float)
    n = model.gradients.shape[1]
    if omega <= 0.0:
        return np.zeros(n), 0.0
    m0 = model(np.zeros(n))
    t_star = min(delta, omega / model.beta)
    ts = [t_star]
    if refine:
        ts.extend(refine_grid(delta))
    best_t, best_m = t_star, model(t_star * direction)
    for t in ts[1:]:
        m = model(t * direction)
        if m < best_m:
            best_t, best_m = t, m
    d = best_t * direction
    decrease = m0 - best_m
    required = 0.5 * omega * min(delta, omega / model.beta)
    slack = delta * gap + 1e-12 * (1.0 + abs(m0))
    if decrease < required - slack:
        raise InvariantError(
            f"Cauchy decrease violated: {decrease!r} < {required!r} (omega={omega!r}, beta={model.beta!r})"
        )
    return d, decrease


def cauchy_decrease_holds(decrease, omega, delta, beta, gap=0.0, m0=0.0):
    required = 0.5 * omega * min(delta, omega / beta)
    return decrease >= required - delta * gap - 1e-12 * (1.0 + abs(m0))


def model_error_check(problem, x, samples, d, model, c_f, delta=None, phi_trial=None):
    """Compare ``|phi_N(x + d) - m(d)|`` against ``c_f * delta**2``.

    ``phi_trial`` may carry an already computed ``phi_N(x + d)``.
    """
    d = np.asarray(d, dtype=float)
    delta = float(np.linalg.norm(d)) if delta is None else delta
    if phi_trial is None:
        phi_trial = scalarize(problem, np.asarray(x, dtype=float) + d, samples)
    lhs = abs(phi_trial - model(d))
    bound = c_f * delta**2
    return lhs, bound, lhs <= bound * (1 + 1e-9) + 1e-12


def model_hessians(problem, x, samples, policy, scale=1.0):
    if policy == "exact":
        return np.stack([problem.hessian(i, x, idx) for i, idx in enumerate(samples)])
    if policy == "zero":
        return np.zeros((problem.q, problem.n, problem.n))
    if policy == "identity":
        return np.broadcast_to(scale * np.eye(problem.n), (problem.q, problem.n, problem.n)).copy()
    raise InputError(f"unknown Hessian policy {policy!r}; expected one of {HESSIAN_POLICIES}")
