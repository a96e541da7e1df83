"""Reference methods: stochastic multi-gradient (SMG) and deterministic MOTR."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError
from .marginal import default_tol, marginal_true, min_norm_point
from .sampling import BRANCH_FULL
from .solver import IterateRecord, RunTrace, run


@dataclass
class SmgConfig:
    """Step sizes ``alpha0 / (k + 1)**alpha_power``; batch defaults to 5% of N."""

    x0: float | list = 0.1
    alpha0: float = 0.5
    alpha_power: float = 0.5
    batch_size: int | None = None
    budget: int | None = None
    max_iter: int | None = 1000
    track_true_omega: bool = True
    seed: int = 0

    def problems(self):
        out = []
        if self.alpha0 <= 0:
            out.append("smg.alpha0 must be positive")
        if self.alpha_power < 0:
            out.append("smg.alpha_power must be nonnegative (step sizes nonincreasing)")
        if self.batch_size is not None and self.batch_size < 1:
            out.append("smg.batch_size must be >= 1")
        if self.budget is None and self.max_iter is None:
            out.append("smg: set budget and/or max_iter")
        return out

    def alpha(self, k):
        return self.alpha0 / (k + 1) ** self.alpha_power


def smg_step(problem, x, batches, alpha, tol=None):
    """One SMG update ``x - alpha * gbar``; returns ``(x_new, marginal, values)``."""
    if len(batches) != problem.q:
        raise InputError(f"expected {problem.q} batches, got {len(batches)}")
    vals, grads = [], []
    for i, idx in enumerate(batches):
        v, g = problem.evaluate(i, x, idx)
        vals.append(v)
        grads.append(g)
    marg = min_norm_point(grads, tol)
    return x - alpha * marg.combination, marg, vals


def run_smg(problem, config, seed=None):
    errs = config.problems()
    if errs:
        raise ConfigError(errs)
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    batch = config.batch_size or max(1, int(round(0.05 * problem.N)))
    batch = min(batch, problem.N)
    tol = default_tol(problem.q)
    diag = problem.with_meter() if config.track_true_omega else None
    x = np.asarray(config.x0, dtype=float)
    x = np.full(problem.n, float(x)) if x.ndim == 0 else x.copy()
    x = problem.check_point(x)
    meter = problem.meter
    start = meter.scalar_products
    trace = RunTrace(q=problem.q, solver="smg", seed=seed)
    k = 0
    while True:
        if config.max_iter is not None and k >= config.max_iter:
            trace.stop_reason = "max_iter"
            break
        if config.budget is not None and meter.scalar_products - start >= config.budget:
            trace.stop_reason = "budget"
            break
        batches = [rng.integers(0, problem.N, size=batch) for _ in range(problem.q)]
        alpha = config.alpha(k)
        omega_true = marginal_true(diag, x, tol).omega if diag is not None else None
        x_new, marg, vals = smg_step(problem, x, batches, alpha, tol)
        trace.records.append(IterateRecord(
            k=k, cost=meter.scalar_products - start, delta=alpha, omega_sub=marg.omega,
            omega_true=omega_true, rho_N=None, rho_D=None, accepted=True,
            sizes=(batch,) * problem.q, phi_sub=max(vals), branches=(BRANCH_FULL,) * problem.q,
        ))
        x = x_new
        k += 1
    trace.final_x = x
    return x, trace


def deterministic_motr(problem, config, seed=None):
    """The trust-region driver started (and kept) at the full sample."""
    sampling = dataclasses.replace(config.sampling, initial_sizes=[problem.N] * problem.q)
    full = dataclasses.replace(config, sampling=sampling)
    x, trace = run(problem, full, seed=seed)
    trace.solver = "det-motr"
    return x, trace

