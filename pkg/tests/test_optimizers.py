import math

import numpy as np
import pytest

from qcbench.optimizers import METHODS, minimize


def test_cosine_minimum_both_methods():
    for method in METHODS:
        res = minimize(
            lambda x: math.cos(x[0]), [0.3], method=method,
            bounds=[(-math.pi, math.pi)], max_evaluations=200, tolerance=1e-12,
        )
        assert res.fun == pytest.approx(-1.0, abs=1e-8)
        assert abs(abs(res.x[0]) - math.pi) < 1e-3
        assert res.n_evaluations <= 200


def test_quadratic_bowl_three_dim():
    target = np.array([0.4, -1.1, 2.0])

    def f(x):
        return float(np.sum((x - target) ** 2)) + 3.0

    for method in METHODS:
        res = minimize(
            f, [0.0, 0.0, 0.0], method=method,
            bounds=[(-4.0, 4.0)] * 3, max_evaluations=400, tolerance=1e-12,
        )
        assert res.fun == pytest.approx(3.0, abs=1e-6)
        np.testing.assert_allclose(res.x, target, atol=1e-3)


def test_bounds_are_respected():
    evaluated = []

    def f(x):
        evaluated.append(np.array(x))
        return float((x[0] - 5.0) ** 2)  # true minimum outside the box

    res = minimize(f, [0.0], method="bobyqa_style_quadratic",
                   bounds=[(-1.0, 1.0)], max_evaluations=150)
    for x in evaluated:
        assert -1.0 - 1e-12 <= x[0] <= 1.0 + 1e-12
    assert res.x[0] == pytest.approx(1.0, abs=1e-6)


def test_budget_is_hard():
    calls = [0]

    def f(x):
        calls[0] += 1
        return float(np.sum(x**2))

    for method in METHODS:
        calls[0] = 0
        minimize(f, [1.0, 1.0], method=method, max_evaluations=25)
        assert calls[0] <= 25


def test_deterministic_given_seed():
    def f(x):
        return float(np.sum(x**2) + 0.2 * np.sin(5 * x[0]))

    a = minimize(f, [0.8, -0.5], method="bobyqa_style_quadratic",
                 max_evaluations=120, rng=4)
    b = minimize(f, [0.8, -0.5], method="bobyqa_style_quadratic",
                 max_evaluations=120, rng=4)
    assert a.fun == b.fun
    np.testing.assert_array_equal(a.x, b.x)


def test_multimodal_landscape_reaches_a_local_minimum():
    def f(x):
        return math.sin(3 * x[0]) + 0.1 * x[0] ** 2

    res = minimize(f, [0.1], method="bobyqa_style_quadratic",
                   bounds=[(-math.pi, math.pi)], max_evaluations=200, tolerance=1e-12)
    # gradient nearly zero at the returned point
    h = 1e-5
    grad = (f(res.x + h) - f(res.x - h)) / (2 * h)
    assert abs(grad) < 1e-3


def test_unknown_method_raises():
    with pytest.raises(ValueError):
        minimize(lambda x: 0.0, [0.0], method="gradient_descent")
