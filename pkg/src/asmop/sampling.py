"""Sample-size state, additional sampling and the sample-update cascade.

Multisets are integer index arrays drawn uniformly with replacement.  Once a
component's size reaches ``N`` its sample becomes the deterministic full
index set and stays there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantError

INCREASE_RULES = ("fixed", "geometric")

# Step-2 branch labels recorded per component in the trace.
BRANCH_CRITICAL = "a"  # omega_N < eps * h: grow
BRANCH_REJECT_D = "b"  # rho_D < nu: grow
BRANCH_KEEP = "c"  # rho_N < eta: same size, same multiset
BRANCH_REDRAW = "d"  # same size, fresh multiset
BRANCH_FULL = "-"  # component already at full sample
GROWTH_BRANCHES = (BRANCH_CRITICAL, BRANCH_REJECT_D)


@dataclass
class SamplingConfig:
    initial_fraction: float = 0.05
    initial_sizes: list | None = None
    increment_fraction: float = 0.001
    increase_rule: str = "fixed"
    growth_factor: float = 1.1
    additional_size: int = 1

    def problems(self):
        out = []
        if not 0 < self.initial_fraction <= 1:
            out.append("sampling.initial_fraction must be in (0, 1]")
        if not 0 < self.increment_fraction <= 1:
            out.append("sampling.increment_fraction must be in (0, 1]")
        if self.increase_rule not in INCREASE_RULES:
            out.append(f"sampling.increase_rule must be one of {INCREASE_RULES}")
        if self.growth_factor <= 1:
            out.append("sampling.growth_factor must exceed 1")
        if int(self.additional_size) < 1:
            out.append("sampling.additional_size must be >= 1")
        if self.initial_sizes is not None and any(int(s) < 1 for s in self.initial_sizes):
            out.append("sampling.initial_sizes must be positive")
        return out


@dataclass
class AdditionalSample:
    samples: list
    forced_full: list

    @property
    def sizes(self):
        return [len(s) for s in self.samples]


class SampleState:
    """Per-component sizes ``N_k^i`` and multisets ``N_k^i`` for one run."""

    def __init__(self, N, q, config=None, seed=None, rng=None):
        self.N = int(N)
        self.q = int(q)
        self.config = config or SamplingConfig()
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self._full = np.arange(self.N)
        if self.config.initial_sizes is not None:
            if len(self.config.initial_sizes) != self.q:
                raise InputError("initial_sizes needs one entry per component")
            sizes = [min(self.N, int(s)) for s in self.config.initial_sizes]
        else:
            sizes = [min(self.N, max(1, int(round(self.config.initial_fraction * self.N))))] * self.q
        self.sizes = sizes
        self.samples = [self._draw(s) for s in sizes]
        self.history = [tuple(self.sizes)]

    def _draw(self, size):
        if size >= self.N:
            return self._full
        return self.rng.integers(0, self.N, size=size)

    @property
    def full_indices(self):
        return self._full

    def is_full(self, i):
        return self.sizes[i] >= self.N

    def minibatch_components(self):
        """Components still below the full sample."""
        return [i for i in range(self.q) if self.sizes[i] < self.N]

    @property
    def mb_phase(self):
        return bool(self.minibatch_components())

    def increment(self):
        return max(1, int(round(self.config.increment_fraction * self.N)))

    def next_size(self, size):
        if self.config.increase_rule == "geometric":
            grown = max(size + 1, math.ceil(size * self.config.growth_factor - 1e-9))
        else:
            grown = size + self.increment()
        return min(self.N, grown)

    def grow(self, i):
        self.sizes[i] = self.next_size(self.sizes[i])
        self.samples[i] = self._draw(self.sizes[i])

    def redraw(self, i):
        self.samples[i] = self._draw(self.sizes[i])


def error_estimate(state, i):
    return (state.N - state.sizes[i]) / state.N


def draw_additional(state, config=None):
    """Independent check sample; full-sample components reuse the full set."""
    config = config or state.config
    mb = state.minibatch_components()
    if not mb:
        raise InvariantError("additional sampling requested in the full-sample phase")
    size = min(int(config.additional_size), state.N - 1)
    samples, forced = [], []
    for i in range(state.q):
        if i in mb:
            samples.append(state.rng.integers(0, state.N, size=size))
            forced.append(False)
        else:
            samples.append(state.full_indices)
            forced.append(True)
    return AdditionalSample(samples, forced)


def step2_update(state, omega_N, rho_D, rho_N, *, epsilon, nu, eta):
    """Apply the sample-update cascade to every mini-batch component.

    ``rho_N`` is ``None`` when no candidate was formed (subsampled
    criticality); such components are redrawn unless a growth branch fires.
    Returns one branch label per component.
    """
    branches = []
    for i in range(state.q):
        if state.is_full(i):
            branches.append(BRANCH_FULL)
            continue
        if rho_D is None:
            raise InvariantError("rho_D is required while some component is below full sample")
        if omega_N < epsilon * error_estimate(state, i):
            state.grow(i)
            branches.append(BRANCH_CRITICAL)
        elif rho_D < nu:
            state.grow(i)
            branches.append(BRANCH_REJECT_D)
        elif rho_N is not None and rho_N < eta:
            branches.append(BRANCH_KEEP)
        else:
            state.redraw(i)
            branches.append(BRANCH_REDRAW)
    state.history.append(tuple(state.sizes))
    return branches
