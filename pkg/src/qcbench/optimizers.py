"""Bounded derivative-free minimisers for low-dimensional energy landscapes.

Two methods with one calling convention.  ``nelder_mead`` delegates to scipy.
``bobyqa_style_quadratic`` is a small trust-region search that fits a least
squares quadratic model to recent samples and minimises it inside the
intersection of the trust box and the bounds; it is written here because the
parameter spaces in this package have at most three dimensions, where the
full machinery of a production BOBYQA brings nothing.

Both methods are deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize as sciopt

METHODS = ("nelder_mead", "bobyqa_style_quadratic")


@dataclass
class OptimizationResult:
    x: np.ndarray
    fun: float
    n_evaluations: int
    converged: bool
    message: str = ""


class _CountedFunction:
    def __init__(self, f: Callable[[np.ndarray], float], budget: int):
        self.f = f
        self.budget = budget
        self.n = 0
        self.best_x: Optional[np.ndarray] = None
        self.best_f = math.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.n >= self.budget:
            raise _BudgetExhausted()
        self.n += 1
        value = float(self.f(np.asarray(x, dtype=float)))
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float)
        return value


class _BudgetExhausted(Exception):
    pass


def _normalise_bounds(bounds: Sequence[Tuple[float, float]], dim: int) -> np.ndarray:
    arr = np.asarray(bounds, dtype=float)
    if arr.shape != (dim, 2) or np.any(arr[:, 0] >= arr[:, 1]):
        raise ValueError(f"bad bounds for dimension {dim}: {bounds}")
    return arr


def minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    method: str = "nelder_mead",
    bounds: Optional[Sequence[Tuple[float, float]]] = None,
    max_evaluations: int = 400,
    tolerance: float = 1e-9,
    rng: Union[None, int, np.random.Generator] = None,
) -> OptimizationResult:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if bounds is None:
        bounds = [(-math.pi, math.pi)] * x0.shape[0]
    box = _normalise_bounds(bounds, x0.shape[0])
    x0 = np.clip(x0, box[:, 0], box[:, 1])
    if method == "nelder_mead":
        return _nelder_mead(f, x0, box, max_evaluations, tolerance)
    if method == "bobyqa_style_quadratic":
        generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        return _quadratic_model_search(f, x0, box, max_evaluations, tolerance, generator)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def _nelder_mead(f, x0, box, max_evaluations, tolerance) -> OptimizationResult:
    counted = _CountedFunction(f, max_evaluations)
    try:
        res = sciopt.minimize(
            counted,
            x0,
            method="Nelder-Mead",
            bounds=box,
            options={
                "maxfev": max_evaluations,
                "fatol": tolerance,
                "xatol": math.sqrt(max(tolerance, 1e-16)),
            },
        )
        return OptimizationResult(
            np.asarray(res.x, dtype=float), float(res.fun), counted.n,
            bool(res.success), str(res.message),
        )
    except _BudgetExhausted:
        return OptimizationResult(
            counted.best_x, counted.best_f, counted.n, False, "evaluation budget exhausted"
        )


# ---------------------------------------------------------------------------
# quadratic-model trust region
# ---------------------------------------------------------------------------

def _features(dx: np.ndarray) -> np.ndarray:
    """[1, dx_i, dx_i*dx_j for i<=j] feature row of a quadratic model."""
    n = dx.shape[0]
    quad = [dx[i] * dx[j] for i in range(n) for j in range(i, n)]
    return np.concatenate(([1.0], dx, quad))


def _model_parts(coeffs: np.ndarray, n: int) -> Tuple[float, np.ndarray, np.ndarray]:
    c0 = coeffs[0]
    g = coeffs[1 : 1 + n]
    hess = np.zeros((n, n))
    k = 1 + n
    for i in range(n):
        for j in range(i, n):
            if i == j:
                hess[i, i] = 2.0 * coeffs[k]
            else:
                hess[i, j] = hess[j, i] = coeffs[k]
            k += 1
    return float(c0), g, hess


def _quadratic_model_search(f, x0, box, max_evaluations, tolerance, rng) -> OptimizationResult:
    n = x0.shape[0]
    n_features = 1 + n + n * (n + 1) // 2
    counted = _CountedFunction(f, max_evaluations)
    span = float(np.min(box[:, 1] - box[:, 0]))
    delta = min(0.5, span / 4.0)
    delta_min = 1e-11

    points: List[np.ndarray] = []
    values: List[float] = []

    def sample(x) -> float:
        x = np.clip(np.asarray(x, dtype=float), box[:, 0], box[:, 1])
        for old, fold in zip(points, values):
            if np.max(np.abs(old - x)) < 1e-13:
                return fold
        value = counted(x)
        points.append(x)
        values.append(value)
        return value

    converged = False
    message = "evaluation budget exhausted"
    try:
        sample(x0)
        for i in range(n):
            step = np.zeros(n)
            step[i] = delta
            sample(x0 + step)
            sample(x0 - step)

        stall = 0
        while delta > delta_min:
            order = np.argsort(values)
            xb = points[order[0]]
            fb = values[order[0]]

            near = [
                k for k in range(len(points))
                if np.max(np.abs(points[k] - xb)) <= 3.0 * delta
            ]
            near = sorted(near, key=lambda k: values[k])[: max(3 * n_features, 12)]
            if len(near) < n_features:
                # refresh geometry around the incumbent
                direction = rng.standard_normal(n)
                direction /= max(np.linalg.norm(direction), 1e-12)
                sample(xb + delta * direction)
                continue

            a = np.vstack([_features(points[k] - xb) for k in near])
            b = np.array([values[k] for k in near])
            coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
            _, g, hess = _model_parts(coeffs, n)

            lo = np.maximum(box[:, 0] - xb, -delta)
            hi = np.minimum(box[:, 1] - xb, delta)
            sub = sciopt.minimize(
                lambda d: (g @ d + 0.5 * d @ hess @ d, g + hess @ d),
                np.zeros(n),
                jac=True,
                method="L-BFGS-B",
                bounds=list(zip(lo, hi)),
            )
            step = np.asarray(sub.x, dtype=float)
            predicted = -(g @ step + 0.5 * step @ hess @ step)
            if predicted <= max(1e-15, tolerance * 1e-3) or np.max(np.abs(step)) < 1e-13:
                delta *= 0.5
                continue

            f_new = sample(xb + step)
            actual = fb - f_new
            rho = actual / predicted
            if rho < 0.1:
                delta *= 0.5
            elif rho > 0.7 and np.max(np.abs(step)) > 0.8 * delta:
                delta = min(2.0 * delta, span / 2.0)

            if actual < tolerance:
                stall += 1
                if stall >= 3 and delta < math.sqrt(max(tolerance, 1e-14)):
                    converged = True
                    message = "model reduction below tolerance"
                    break
            else:
                stall = 0
        else:
            converged = True
            message = "trust region collapsed"
    except _BudgetExhausted:
        pass

    return OptimizationResult(
        counted.best_x, counted.best_f, counted.n, converged, message
    )
