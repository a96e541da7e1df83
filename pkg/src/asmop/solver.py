"""Additional-sampling trust-region driver for finite-sum multi-objective problems."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError, InputError, InvariantError, NumericError
from .marginal import default_tol, marginal_true, min_norm_point
from .model import HESSIAN_POLICIES, build_model, cauchy_step, model_error_check, model_hessians
from .sampling import BRANCH_FULL, SampleState, SamplingConfig, draw_additional, step2_update

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    x0: float | list = 0.1
    delta0: float = 1.0
    delta_max: float = 8.0
    gamma1: float = 0.5
    gamma2: float | None = None  # must equal 1 / gamma1; filled in when omitted
    nu: float = 1e-4
    eta: float = 0.25
    epsilon: float = 1e-5
    t_scale: float = 1.0  # C1 in t_k = C1 / (k + 1)**p
    tbar_scale: float = 1.0  # C2 in tbar_k = C2 / (k + 1)**p
    t_power: float = 1.1
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    hessian: str = "exact"
    hessian_scale: float = 1.0
    c_b: float | None = None  # default 1 + c_h of the problem
    refine_step: bool = True
    budget: int | None = None
    max_iter: int | None = 1000
    omega_tol: float = 1e-8  # stop once in the full-sample phase with omega_N below this
    marginal_tol: float | None = None
    track_true_omega: bool = True
    checks: bool = True
    strict: bool = False
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.sampling, dict):
            self.sampling = SamplingConfig(**self.sampling)
        if self.gamma2 is None and self.gamma1 > 0:
            self.gamma2 = 1.0 / self.gamma1

    def problems(self):
        out = []
        if not 0 < self.delta0 < self.delta_max:
            out.append("delta0 must lie in (0, delta_max)")
        if not 0 < self.gamma1 < 1:
            out.append("gamma1 must lie in (0, 1)")
        elif self.gamma2 is not None and not math.isclose(self.gamma2, 1.0 / self.gamma1, rel_tol=1e-12):
            out.append(f"gamma2 must equal 1/gamma1 = {1.0 / self.gamma1!r}, got {self.gamma2!r}")
        if self.nu <= 0:
            out.append("nu must be positive")
        if not 0 < self.eta < 0.75:
            out.append("eta must lie in (0, 3/4)")
        if self.epsilon <= 0:
            out.append("epsilon must be positive")
        if self.t_scale <= 0 or self.tbar_scale <= 0:
            out.append("t_scale and tbar_scale must be positive")
        if self.t_power <= 1:
            out.append("t_power must exceed 1 so the tolerance sequences are summable")
        if self.hessian not in HESSIAN_POLICIES:
            out.append(f"hessian must be one of {HESSIAN_POLICIES}")
        if self.c_b is not None and self.c_b < 1:
            out.append("c_b must be at least 1")
        if self.budget is None and self.max_iter is None:
            out.append("set budget and/or max_iter")
        if self.budget is not None and self.budget <= 0:
            out.append("budget must be positive")
        if self.max_iter is not None and self.max_iter < 0:
            out.append("max_iter must be nonnegative")
        if self.omega_tol < 0:
            out.append("omega_tol must be nonnegative")
        if self.marginal_tol is not None and self.marginal_tol <= 0:
            out.append("marginal_tol must be positive")
        out.extend(self.sampling.problems())
        return out

    def validate(self):
        errs = self.problems()
        if errs:
            raise ConfigError(errs)
        return self

    def t(self, k):
        return self.t_scale / (k + 1) ** self.t_power

    def tbar(self, k):
        return self.tbar_scale / (k + 1) ** self.t_power

    def initial_point(self, n):
        x0 = np.asarray(self.x0, dtype=float)
        if x0.ndim == 0:
            return np.full(n, float(x0))
        if x0.shape != (n,):
            raise InputError(f"x0 has shape {x0.shape}, problem dimension is {n}")
        return x0.copy()


@dataclass
class IterateRecord:
    k: int
    cost: int
    delta: float
    omega_sub: float
    omega_true: float | None
    rho_N: float | None
    rho_D: float | None
    accepted: bool
    sizes: tuple
    phi_sub: float
    phi_trial: float | None = None
    model_decrease: float | None = None
    beta: float | None = None
    phi_fix: float | None = None
    branches: tuple = ()


@dataclass
class RunTrace:
    q: int
    records: list = field(default_factory=list)
    solver: str = "asmop"
    seed: int | None = None
    stop_reason: str = ""
    final_x: np.ndarray | None = None
    cauchy_violations: int = 0
    model_error_violations: int = 0
    model_error_worst_ratio: float = 0.0

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return [getattr(r, name) for r in self.records]

    @property
    def final_cost(self):
        return self.records[-1].cost if self.records else 0


def rho_n(phi_trial, phi_k, delta, t_k, model_change):
    """Non-monotone ratio; ``model_change = m(d) - m(0)`` must be negative."""
    if not model_change < 0:
        raise InvariantError(f"model change must be negative, got {model_change!r}")
    return (phi_trial - phi_k - delta * t_k) / model_change


def rho_d(phi_D_trial, phi_D_k, delta, tbar_k, grad_norm):
    """Additional-sampling ratio; a zero gradient norm maps to +/-inf."""
    if grad_norm < 0:
        raise InputError("gradient norm must be nonnegative")
    vals = (phi_D_trial, phi_D_k, delta, tbar_k, grad_norm)
    if not all(math.isfinite(v) for v in vals):
        raise NumericError("non-finite input to rho_D")
    num = phi_D_trial - phi_D_k - delta * tbar_k
    if grad_norm == 0.0:
        return math.inf if num <= 0 else -math.inf
    return num / -grad_norm


def radius_update(delta, rho_N, config):
    if rho_N >= config.eta:
        return min(config.delta_max, config.gamma2 * delta)
    return config.gamma1 * delta


def accept_candidate(rho_N, rho_D, mb_phase, config):
    if mb_phase:
        if rho_D is None:
            raise InputError("rho_D is required in the mini-batch phase")
        return rho_N >= config.eta and rho_D >= config.nu
    return rho_N >= config.eta


def iterate_update(x_k, x_t, rho_N, rho_D, mb_phase, config):
    return x_t if accept_candidate(rho_N, rho_D, mb_phase, config) else x_k


def _values_grads(problem, x, samples):
    vals, grads = [], []
    for i, idx in enumerate(samples):
        v, g = problem.evaluate(i, x, idx)
        vals.append(v)
        grads.append(g)
    return np.array(vals), np.array(grads)


def run(problem, config, seed=None, callback=None):
    """Run the additional-sampling trust-region method; returns ``(x, trace)``.

    Cost in the trace is counted on ``problem.meter`` from the start of the
    run.  True marginal values and the per-sample max average are computed on
    a separate meter and never charged to the run.  ``callback(record, x_k)``
    is invoked after every iteration.
    """
    config.validate()
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    state = SampleState(problem.N, problem.q, config.sampling, rng=rng)
    diag = problem.with_meter() if config.track_true_omega else None
    tol = config.marginal_tol or default_tol(problem.q)
    c_b = config.c_b if config.c_b is not None else 1.0 + problem.c_h
    c_f = 0.5 * (problem.c_h + c_b)

    x = config.initial_point(problem.n)
    delta = float(config.delta0)
    meter = problem.meter
    start = meter.scalar_products
    trace = RunTrace(q=problem.q, seed=seed)
    k = 0
    while True:
        if config.max_iter is not None and k >= config.max_iter:
            trace.stop_reason = "max_iter"
            break
        if config.budget is not None and meter.scalar_products - start >= config.budget:
            trace.stop_reason = "budget"
            break
        try:
            rec, x_next, next_delta, stop = _iteration(problem, config, state, diag, x, delta, k, tol, c_b, c_f, trace)
        except NumericError as exc:
            exc.iteration = k
            raise
        rec.cost = meter.scalar_products - start
        trace.records.append(rec)
        if callback is not None:
            callback(rec, x)
        x, delta = x_next, next_delta
        if stop:
            trace.stop_reason = stop
            break
        k += 1
    trace.final_x = x
    return x, trace


def _iteration(problem, config, state, diag, x, delta, k, tol, c_b, c_f, trace):
    samples = list(state.samples)
    sizes = tuple(state.sizes)
    mb = state.mb_phase

    vals, grads = _values_grads(problem, x, samples)
    phi_k = float(vals.max())
    marg = min_norm_point(grads, tol)
    omega_N = marg.omega
    omega_true = phi_fix = None
    if diag is not None:
        omega_true = marginal_true(diag, x, tol).omega
        phi_fix = diag.phi_fix(x)

    critical = omega_N <= tol
    if not mb and (omega_N <= config.omega_tol or critical):
        rec = IterateRecord(k, 0, delta, omega_N, omega_true, None, None, False, sizes, phi_k,
                            phi_fix=phi_fix, branches=(BRANCH_FULL,) * problem.q)
        return rec, x, delta, "critical"

    x_t, phi_t, decrease, rho_N, beta = x, None, None, None, None
    if not critical:
        H = model_hessians(problem, x, samples, config.hessian, config.hessian_scale)
        model = build_model(vals, grads, H, c_b)
        beta = model.beta
        try:
            d, decrease = cauchy_step(model, omega_N, marg.direction, delta, marg.gap, config.refine_step)
        except InvariantError:
            trace.cauchy_violations += 1
            raise
        if decrease <= 0.0:
            # the model cannot resolve any decrease in floating point: no candidate
            critical, decrease = True, None
            if not mb:
                rec = IterateRecord(k, 0, delta, omega_N, omega_true, None, None, False, sizes, phi_k,
                                    beta=beta, phi_fix=phi_fix, branches=(BRANCH_FULL,) * problem.q)
                return rec, x, delta, "stalled"
    if not critical:
        x_t = x + d
        phi_t = max(problem.value(i, x_t, idx) for i, idx in enumerate(samples))
        if config.checks:
            lhs, bound, ok = model_error_check(problem, x, samples, d, model, c_f, delta, phi_trial=phi_t)
            if bound > 0:
                trace.model_error_worst_ratio = max(trace.model_error_worst_ratio, lhs / bound)
            if not ok:
                trace.model_error_violations += 1
                log.warning("model error bound violated at k=%d: %g > %g", k, lhs, bound)
                if config.strict:
                    raise InvariantError(f"model error bound violated at k={k}")
        rho_N = rho_n(phi_t, phi_k, delta, config.t(k), -decrease)

    rho_D = None
    branches = (BRANCH_FULL,) * problem.q
    if mb:
        extra = draw_additional(state)
        phi_D_t = phi_D_k = -math.inf
        gnorm = 0.0
        for i, idx in enumerate(extra.samples):
            v_k, g_k = problem.evaluate(i, x, idx)
            v_t = problem.value(i, x_t, idx)
            phi_D_k = max(phi_D_k, v_k)
            phi_D_t = max(phi_D_t, v_t)
            gnorm = max(gnorm, float(np.linalg.norm(g_k)))
        rho_D = rho_d(phi_D_t, phi_D_k, delta, config.tbar(k), gnorm)
        branches = tuple(step2_update(state, omega_N, rho_D, rho_N,
                                      epsilon=config.epsilon, nu=config.nu, eta=config.eta))

    if critical:
        accepted, next_delta = False, delta
    else:
        accepted = accept_candidate(rho_N, rho_D, mb, config)
        next_delta = radius_update(delta, rho_N, config)

    rec = IterateRecord(k, 0, delta, omega_N, omega_true, rho_N, rho_D, accepted, sizes, phi_k,
                        phi_trial=phi_t, model_decrease=decrease, beta=beta, phi_fix=phi_fix, branches=branches)
    return rec, (x_t if accepted else x), next_delta, None


TRACE_FIELDS = [f.name for f in fields(IterateRecord)]
