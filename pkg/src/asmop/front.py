"""Pareto-front approximation: seed, perturb, refine, keep the nondominated set."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import AsmopError, ConfigError
from .solver import run

log = logging.getLogger(__name__)


@dataclass
class FrontConfig:
    n_seeds: int = 8
    init_scale: float = 1.0
    radius: float = 0.5
    children: int = 4
    inner_iterations: int = 30
    rounds: int = 3
    seed: int = 0

    def problems(self):
        out = []
        if self.n_seeds < 1:
            out.append("front.n_seeds must be >= 1")
        if self.rounds < 1:
            out.append("front.rounds must be >= 1")
        if self.children < 1:
            out.append("front.children must be >= 1")
        if self.inner_iterations < 1:
            out.append("front.inner_iterations must be >= 1")
        if self.radius <= 0 or self.init_scale < 0:
            out.append("front.radius must be positive and front.init_scale nonnegative")
        return out


@dataclass(frozen=True)
class FrontEntry:
    x: np.ndarray
    f: np.ndarray


@dataclass
class FrontArchive:
    entries: list = field(default_factory=list)
    generation: int = 0
    hypervolumes: list = field(default_factory=list)
    reference: np.ndarray | None = None

    def objectives(self):
        return np.array([e.f for e in self.entries])

    def __len__(self):
        return len(self.entries)


def dominates(u, v):
    u, v = np.asarray(u), np.asarray(v)
    return bool(np.all(u <= v) and np.any(u < v))


def nondominated_filter(entries):
    """Maximal nondominated subset, duplicates reduced to their first occurrence,
    ordered lexicographically by objective vector."""
    entries = list(entries)
    if not entries:
        return []
    F = np.array([np.asarray(e.f, dtype=float) for e in entries])
    if F.ndim != 2 or not np.all(np.isfinite(F)):
        raise ValueError("objective vectors must be finite and of equal length")
    leq = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominated = np.any(leq & lt, axis=0)
    kept, seen = [], set()
    for j in np.flatnonzero(~dominated):
        key = F[j].tobytes()
        if key in seen:
            continue
        seen.add(key)
        kept.append(j)
    kept.sort(key=lambda j: tuple(F[j]))
    return [entries[j] for j in kept]


def hypervolume_2d(F, reference):
    """Area dominated by the points ``F`` (minimization) and bounded by ``reference``."""
    F = np.asarray(F, dtype=float)
    if F.size == 0:
        return 0.0
    F = F[np.all(F < reference, axis=1)]
    if len(F) == 0:
        return 0.0
    F = F[np.lexsort((F[:, 1], F[:, 0]))]
    area, best_f2 = 0.0, reference[1]
    for f1, f2 in F:
        if f2 < best_f2:
            area += (reference[0] - f1) * (best_f2 - f2)
            best_f2 = f2
    return float(area)


def _refine(problem, x0, solver_config, iterations, seed):
    cfg = dataclasses.replace(solver_config, x0=list(map(float, x0)), max_iter=iterations,
                              budget=None, track_true_omega=False)
    x, _ = run(problem, cfg, seed=seed)
    return x


def build_front(problem, solver_config, config, refine=None):
    """Grow a nondominated archive by perturbing archive points and refining them.

    ``refine(problem, x0, solver_config, iterations, seed) -> x`` defaults to
    a short run of the trust-region solver.
    """
    errs = config.problems()
    if errs:
        raise ConfigError(errs)
    refine = refine or _refine
    rng = np.random.default_rng(config.seed)
    evaluator = problem.with_meter()
    center = solver_config.initial_point(problem.n)

    def entry(x):
        return FrontEntry(np.array(x, dtype=float), evaluator.objectives(x))

    def refine_many(points):
        out = []
        for x0 in points:
            child_seed = int(rng.integers(2**31))
            try:
                out.append(entry(refine(problem, x0, solver_config, config.inner_iterations, child_seed)))
            except AsmopError as exc:
                log.warning("skipping child at %s: %s", np.array2string(np.asarray(x0), precision=4), exc)
        return out

    seeds = center + config.init_scale * rng.standard_normal((config.n_seeds, problem.n))
    archive = FrontArchive(entries=nondominated_filter(refine_many(seeds)))
    if problem.q == 2 and archive.entries:
        archive.reference = archive.objectives().max(axis=0) + 1.0
        archive.hypervolumes.append(hypervolume_2d(archive.objectives(), archive.reference))
    for _ in range(config.rounds):
        children = []
        for e in archive.entries:
            u = rng.standard_normal((config.children, problem.n))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            children.extend(e.x + config.radius * u)
        archive.entries = nondominated_filter(archive.entries + refine_many(children))
        archive.generation += 1
        if archive.reference is not None:
            archive.hypervolumes.append(hypervolume_2d(archive.objectives(), archive.reference))
    return archive
