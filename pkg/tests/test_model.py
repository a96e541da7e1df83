import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asmop.errors import InputError, InvariantError
from asmop.marginal import min_norm_point
from asmop.model import (
    QuadraticMaxModel,
    build_model,
    cauchy_decrease_holds,
    cauchy_step,
    clip_spectrum,
    model_error_check,
    model_hessians,
    model_value,
    refine_grid,
    spectral_norm,
)
from asmop.oracles import power_iteration_norm


def half_norm_model(x):
    # f(x) = 1/2 ||x||^2 at x
    x = np.asarray(x, dtype=float)
    return build_model([0.5 * x @ x], [x], [np.eye(len(x))])


class TestModelValue:
    def test_origin(self):
        m = build_model([1.0, 3.0], [[1.0, 0.0], [0.0, 1.0]], np.zeros((2, 2, 2)))
        assert model_value(m, np.zeros(2)) == 3.0

    def test_single_quadratic(self):
        m = build_model([0.0], [[1.0, 0.0]], [np.eye(2)])
        assert model_value(m, [-1.0, 0.0]) == -0.5

    def test_two_linear_pieces(self):
        m = build_model([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]], np.zeros((2, 2, 2)))
        d = np.array([-1.0, -1.0]) / math.sqrt(2)
        assert model_value(m, d) == pytest.approx(-math.sqrt(2) / 2, abs=1e-15)
        manual = max(float(g @ d) for g in m.gradients)
        assert model_value(m, d) == manual

    def test_beta(self):
        m = build_model([0.0, 0.0], np.zeros((2, 2)), [np.diag([2.0, -3.0]), np.eye(2)])
        assert m.beta == pytest.approx(4.0)

    def test_clipping_enforces_bound(self, rng):
        H = rng.standard_normal((2, 4, 4))
        H = H + H.transpose(0, 2, 1)
        m = build_model([0.0, 0.0], np.zeros((2, 4)), H, c_b=2.5)
        assert m.beta <= 2.5 + 1e-12
        for Hc in m.hessians:
            assert power_iteration_norm(Hc) <= 1.5 + 1e-9

    def test_clip_is_identity_inside_bound(self):
        H = np.diag([0.5, -0.2])
        assert clip_spectrum(H, 1.0) is H
        assert spectral_norm(H) == 0.5

    def test_shape_errors(self):
        with pytest.raises(InputError):
            build_model([0.0], [[1.0, 0.0]], [np.eye(3)])
        with pytest.raises(InputError):
            build_model([0.0], [[1.0]], [np.eye(1)], c_b=0.5)


class TestCauchyStep:
    def test_critical_model(self):
        m = half_norm_model([0.0, 0.0])
        d, dec = cauchy_step(m, 0.0, np.zeros(2), 1.0)
        assert not d.any() and dec == 0.0

    def test_large_radius(self):
        m = half_norm_model([2.0, 0.0])
        assert m.beta == 2.0
        d, dec = cauchy_step(m, 2.0, [-1.0, 0.0], 10.0, refine=False)
        np.testing.assert_allclose(d, [-1.0, 0.0])
        assert dec == pytest.approx(1.5)
        assert dec >= 0.5 * 2 * min(10, 1)

    def test_small_radius(self):
        m = half_norm_model([2.0, 0.0])
        d, dec = cauchy_step(m, 2.0, [-1.0, 0.0], 0.5, refine=False)
        np.testing.assert_allclose(d, [-0.5, 0.0])
        assert dec == pytest.approx(0.875)

    def test_dense_grid_oracle(self):
        m = half_norm_model([2.0, 0.0])
        ts = np.linspace(0, 10, 100001)
        best = min(ts, key=lambda t: m(t * np.array([-1.0, 0.0])))
        # the model is minimized at t = 2 (x + d = 0); refinement must not be worse than t* = 1
        assert best == pytest.approx(2.0, abs=1e-4)
        d, dec = cauchy_step(m, 2.0, [-1.0, 0.0], 10.0)
        assert dec >= 1.5

    def test_refinement_never_worse(self, rng):
        for _ in range(50):
            q, n = 3, 4
            G = rng.standard_normal((q, n))
            H = rng.standard_normal((q, n, n))
            H = H + H.transpose(0, 2, 1)
            m = build_model(rng.standard_normal(q), G, H)
            r = min_norm_point(G)
            if r.omega == 0:
                continue
            delta = float(rng.uniform(0.01, 3))
            d_ref, dec_ref = cauchy_step(m, r.omega, r.direction, delta, r.gap)
            d_pure, dec_pure = cauchy_step(m, r.omega, r.direction, delta, r.gap, refine=False)
            assert m(d_ref) <= m(d_pure)
            assert np.linalg.norm(d_ref) <= delta * (1 + 1e-12)
            assert dec_ref == pytest.approx(m(np.zeros(n)) - m(d_ref), rel=1e-12, abs=1e-15)
            assert cauchy_decrease_holds(dec_ref, r.omega, delta, m.beta, r.gap)

    def test_bad_direction_raises(self):
        m = half_norm_model([2.0, 0.0])
        with pytest.raises(InvariantError):
            cauchy_step(m, 2.0, [1.0, 0.0], 1.0, refine=False)

    def test_nonpositive_radius(self):
        with pytest.raises(InputError):
            cauchy_step(half_norm_model([1.0]), 1.0, [-1.0], 0.0)

    def test_refine_grid(self):
        g = refine_grid(2.0)
        assert len(g) == 16 and g[0] == 2.0 and np.all(np.diff(g) < 0) and g[-1] > 0

    @given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0.01, 10))
    @settings(max_examples=100, deadline=None)
    def test_decrease_bound_one_dimensional(self, g, h, delta):
        m = build_model([0.0], [[g]], [[[h]]])
        d, dec = cauchy_step(m, g, [-1.0], delta)
        assert cauchy_decrease_holds(dec, g, delta, m.beta)


class TestModelErrorCheck:
    def test_zero_step(self, logistic_problem):
        x = np.zeros(logistic_problem.n)
        samples = [[0, 1], [2]]
        vals = [logistic_problem.value(i, x, s) for i, s in enumerate(samples)]
        grads = [logistic_problem.evaluate(i, x, s)[1] for i, s in enumerate(samples)]
        m = build_model(vals, grads, model_hessians(logistic_problem, x, samples, "exact"))
        lhs, bound, ok = model_error_check(logistic_problem, x, samples, np.zeros(logistic_problem.n), m, 1.0, 0.3)
        assert lhs == 0.0 and ok

    def test_quadratic_model_is_exact(self, segment_problem, rng):
        p = segment_problem
        samples = [[0], [0]]
        for _ in range(20):
            x = rng.standard_normal(2)
            vals = [p.value(i, x, s) for i, s in enumerate(samples)]
            grads = [p.evaluate(i, x, s)[1] for i, s in enumerate(samples)]
            m = build_model(vals, grads, model_hessians(p, x, samples, "exact"))
            lhs, _, ok = model_error_check(p, x, samples, rng.standard_normal(2), m, 1.0, 1.0)
            assert lhs <= 1e-10 and ok

    def test_logistic_random_steps(self, logistic_problem, rng):
        p = logistic_problem
        c_b = 1 + p.c_h
        c_f = 0.5 * (p.c_h + c_b)
        for _ in range(100):
            x = rng.standard_normal(p.n)
            samples = [rng.integers(0, p.N, 5) for _ in range(2)]
            vals = [p.value(i, x, s) for i, s in enumerate(samples)]
            grads = [p.evaluate(i, x, s)[1] for i, s in enumerate(samples)]
            m = build_model(vals, grads, model_hessians(p, x, samples, "exact"), c_b)
            d = rng.standard_normal(p.n)
            d *= 0.5 / np.linalg.norm(d)
            assert model_error_check(p, x, samples, d, m, c_f, 0.5)[2]

    def test_hessian_policies(self, logistic_problem):
        x = np.zeros(logistic_problem.n)
        samples = [[0], [1]]
        assert not model_hessians(logistic_problem, x, samples, "zero").any()
        H = model_hessians(logistic_problem, x, samples, "identity", 2.0)
        np.testing.assert_array_equal(H[1], 2.0 * np.eye(logistic_problem.n))
        with pytest.raises(InputError):
            model_hessians(logistic_problem, x, samples, "bfgs")


def test_model_is_frozen():
    m = QuadraticMaxModel(np.zeros(1), np.zeros((1, 1)), np.zeros((1, 1, 1)), 1.0)
    with pytest.raises(AttributeError):
        m.beta = 2.0
