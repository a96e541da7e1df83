import numpy as np
import pytest

from asmop.errors import InputError, InvariantError
from asmop.sampling import (
    BRANCH_CRITICAL,
    BRANCH_FULL,
    BRANCH_KEEP,
    BRANCH_REDRAW,
    BRANCH_REJECT_D,
    SampleState,
    SamplingConfig,
    draw_additional,
    error_estimate,
    step2_update,
)

THRESHOLDS = dict(epsilon=1e-5, nu=1e-4, eta=0.25)


def state(N=10000, q=2, seed=0, **kw):
    return SampleState(N, q, SamplingConfig(**kw), seed=seed)


class TestInitialState:
    def test_default_sizes(self):
        s = state()
        assert s.sizes == [500, 500]
        assert all(len(m) == 500 for m in s.samples)
        assert s.mb_phase

    def test_small_N_rounds_up_to_one(self):
        assert state(N=5, initial_fraction=0.05).sizes == [1, 1]

    def test_full_start_is_deterministic_set(self):
        s = state(N=20, initial_sizes=[20, 3])
        np.testing.assert_array_equal(s.samples[0], np.arange(20))
        assert s.minibatch_components() == [1]

    def test_initial_sizes_length(self):
        with pytest.raises(InputError):
            state(initial_sizes=[1])

    def test_config_problems(self):
        bad = SamplingConfig(initial_fraction=0, increment_fraction=2, increase_rule="x", growth_factor=1,
                             additional_size=0, initial_sizes=[0])
        assert len(bad.problems()) == 6
        assert SamplingConfig().problems() == []


class TestErrorEstimate:
    @pytest.mark.parametrize("N,size,h", [(10000, 500, 0.95), (100, 95, 0.05), (100, 100, 0.0)])
    def test_values(self, N, size, h):
        s = state(N=N, q=1, initial_sizes=[size])
        assert error_estimate(s, 0) == pytest.approx(h)


class TestAdditional:
    def test_two_singletons(self):
        s = state(N=50)
        a = draw_additional(s)
        assert a.sizes == [1, 1]
        assert all(0 <= m[0] < 50 for m in a.samples)
        assert a.forced_full == [False, False]

    def test_full_component_uses_full_set(self):
        s = state(N=30, initial_sizes=[30, 2])
        a = draw_additional(s)
        np.testing.assert_array_equal(a.samples[0], np.arange(30))
        assert a.sizes == [30, 1] and a.forced_full == [True, False]

    def test_deterministic(self):
        a = draw_additional(state(seed=4))
        b = draw_additional(state(seed=4))
        for u, v in zip(a.samples, b.samples):
            np.testing.assert_array_equal(u, v)

    def test_size_below_N(self):
        s = state(N=3, initial_sizes=[1, 1], additional_size=10)
        assert draw_additional(s).sizes == [2, 2]

    def test_full_phase_contract(self):
        with pytest.raises(InvariantError):
            draw_additional(state(N=4, initial_sizes=[4, 4]))

    def test_uniformity(self):
        N = 20
        s = state(N=N, q=1, initial_sizes=[1])
        draws = np.concatenate([draw_additional(s).samples[0] for _ in range(100000)])
        freq = np.bincount(draws, minlength=N) / len(draws)
        sd = np.sqrt((1 / N) * (1 - 1 / N) / len(draws))
        assert np.all(np.abs(freq - 1 / N) <= 5 * sd)


class TestStep2:
    def test_critical_branch_grows(self):
        s = state()
        assert step2_update(s, 1e-9, 1.0, 1.0, **THRESHOLDS) == [BRANCH_CRITICAL] * 2
        assert s.sizes == [510, 510]
        assert len(s.samples[0]) == 510

    def test_reject_branch_grows(self):
        s = state()
        assert step2_update(s, 1.0, -3.0, 1.0, **THRESHOLDS) == [BRANCH_REJECT_D] * 2
        assert s.sizes == [510, 510]

    def test_keep_branch_preserves_multiset(self):
        s = state()
        before = [m.copy() for m in s.samples]
        assert step2_update(s, 1.0, 1.0, 0.1, **THRESHOLDS) == [BRANCH_KEEP] * 2
        assert s.sizes == [500, 500]
        for u, v in zip(before, s.samples):
            np.testing.assert_array_equal(u, v)

    def test_redraw_branch(self):
        s = state()
        before = s.samples[0].copy()
        changed = False
        for _ in range(20):
            assert step2_update(s, 1.0, 1.0, 0.5, **THRESHOLDS) == [BRANCH_REDRAW] * 2
            assert s.sizes == [500, 500]
            changed |= not np.array_equal(before, s.samples[0])
        assert changed

    def test_no_candidate_redraws(self):
        s = state()
        assert step2_update(s, 1.0, 1.0, None, **THRESHOLDS) == [BRANCH_REDRAW] * 2

    def test_per_component_thresholds(self):
        # h differs per component, so the same omega triggers growth on one only
        s = state(N=100, initial_sizes=[10, 99])
        out = step2_update(s, 0.5, 1.0, 0.5, epsilon=0.6, nu=1e-4, eta=0.25)
        assert out == [BRANCH_CRITICAL, BRANCH_REDRAW]

    def test_full_components_untouched(self):
        s = state(N=40, initial_sizes=[40, 5])
        out = step2_update(s, 1e-12, -1.0, 0.0, **THRESHOLDS)
        assert out == [BRANCH_FULL, BRANCH_CRITICAL]
        np.testing.assert_array_equal(s.samples[0], np.arange(40))

    def test_growth_caps_at_full_set(self):
        s = state(N=100, initial_sizes=[99, 99], increment_fraction=0.05)
        step2_update(s, 0.0, 1.0, 1.0, **THRESHOLDS)
        assert s.sizes == [100, 100]
        np.testing.assert_array_equal(s.samples[1], np.arange(100))
        assert not s.mb_phase

    def test_rho_D_required(self):
        with pytest.raises(InvariantError):
            step2_update(state(), 1.0, None, 1.0, **THRESHOLDS)

    def test_geometric_rule(self):
        s = state(N=1000, initial_sizes=[100, 5], increase_rule="geometric")
        step2_update(s, 1.0, -1.0, 1.0, **THRESHOLDS)
        assert s.sizes == [110, 6]

    def test_history_monotone(self):
        rng = np.random.default_rng(0)
        s = state(N=200)
        for _ in range(300):
            step2_update(s, rng.exponential(1e-4), rng.normal(), rng.normal(), **THRESHOLDS)
        H = np.array(s.history)
        assert np.all(np.diff(H, axis=0) >= 0)
        assert np.all(H <= 200) and np.all(H >= 1)
