"""Fast invariant checks behind ``asmop selftest``."""

from __future__ import annotations

import time

import numpy as np

from .front import FrontEntry, nondominated_filter
from .marginal import min_norm_point
from .model import cauchy_decrease_holds
from .oracles import brute_force_nondominated, grid_min_norm
from .problems import make_logistic_problem, make_synthetic_classification
from .sampling import SamplingConfig
from .solver import SolverConfig, run


def check_min_norm(instances=200, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        q, n = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        G = rng.standard_normal((q, n))
        worst = max(worst, abs(min_norm_point(G).omega - grid_min_norm(G)))
    return worst <= 1e-5, f"max |omega - grid| = {worst:.2e} over {instances} instances"


def check_cauchy(iterations=200, seed=0):
    data = make_synthetic_classification(21, 1000, 2, seed)
    problem = make_logistic_problem([d.features for d in data], [d.labels for d in data], [0.01, 0.01])
    cfg = SolverConfig(max_iter=iterations, track_true_omega=False,
                       sampling=SamplingConfig(increment_fraction=0.01))
    _, trace = run(problem, cfg, seed=seed)
    bad = 0
    for r in trace.records:
        if r.model_decrease is None:
            continue
        if not cauchy_decrease_holds(r.model_decrease, r.omega_sub, r.delta, r.beta):
            bad += 1
    bad += trace.cauchy_violations + trace.model_error_violations
    return bad == 0, f"{len(trace)} iterations, {bad} decrease/model-error violations"


def check_filter(sets=200, seed=0):
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(sets):
        F = rng.integers(0, 6, size=(int(rng.integers(1, 40)), 2)).astype(float)
        entries = [FrontEntry(np.array([j], dtype=float), f) for j, f in enumerate(F)]
        got = {tuple(e.f) for e in nondominated_filter(entries)}
        want = {tuple(F[j]) for j in brute_force_nondominated(F)}
        mismatches += got != want
    return mismatches == 0, f"{mismatches} mismatches over {sets} random sets"


SUITES = [
    ("min-norm oracle equivalence", check_min_norm),
    ("Cauchy decrease on a seeded run", check_cauchy),
    ("nondominated filter vs brute force", check_filter),
]


def run_selftest(out=print):
    ok_all = True
    for name, fn in SUITES:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing suite counts as a failure
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        ok_all &= ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail} ({time.perf_counter() - t0:.1f}s)")
    return ok_all
