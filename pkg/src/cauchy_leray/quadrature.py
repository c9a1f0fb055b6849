"""Tensor-product Gauss rules, with dyadic grading toward ``t1 = 0``.

The graded rule integrates ``|t1|**gamma * h(t)`` for a smooth ``h``: cells
``[c 2^-(k+1), c 2^-k]`` carry Gauss-Legendre nodes, and the innermost cell
``[0, c 2^-L]`` carries a Gauss-Jacobi rule with the weight built in.  The
weights returned by :func:`tensor_rule` already include ``|t1|**gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

MAX_ORDER = 64


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadRule:
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def mapped(self, lo, hi):
        half = 0.5 * (hi - lo)
        return lo + half * (self.nodes + 1.0), half * self.weights


@lru_cache(maxsize=None)
def gauss_rule(order: int) -> QuadRule:
    """Gauss-Legendre rule on [-1, 1]."""
    if not 1 <= order <= MAX_ORDER:
        raise QuadratureError(f"Gauss order must be in [1, {MAX_ORDER}], got {order}")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(order, x, w)


@lru_cache(maxsize=None)
def _jacobi(order: int, gamma: float):
    # weight (1 + x)**gamma on [-1, 1]
    x, w = roots_jacobi(order, 0.0, gamma)
    return x, w


@dataclass(frozen=True)
class GradedScheme:
    """Dyadic grading toward ``t1 = 0`` with an optional ``|t1|**gamma`` weight."""

    levels: int = 12
    order: int = 8
    gamma: float = 0.0
    axis: int = 0

    def __post_init__(self):
        if self.levels < 1:
            raise QuadratureError("graded scheme needs at least one level")
        if self.gamma <= -1:
            raise QuadratureError(f"|t|^{self.gamma} is not integrable at 0")
        gauss_rule(self.order)


def _graded_half(c: float, scheme: GradedScheme):
    """Nodes/weights for int_0^c t**gamma h(t) dt, weights including t**gamma."""
    xs, ws = [], []
    rule = gauss_rule(scheme.order)
    for k in range(scheme.levels):
        lo, hi = c * 2.0 ** -(k + 1), c * 2.0**-k
        x, w = rule.mapped(lo, hi)
        xs.append(x)
        ws.append(w * x**scheme.gamma)
    h = c * 2.0**-scheme.levels
    xj, wj = _jacobi(scheme.order, float(scheme.gamma))
    xs.append(0.5 * h * (xj + 1.0))
    ws.append((0.5 * h) ** (scheme.gamma + 1.0) * wj)
    # innermost first so sums run in a fixed, value-ascending order
    return np.concatenate(xs[::-1]), np.concatenate(ws[::-1])


def axis_rule(lo: float, hi: float, order: int, scheme: GradedScheme | None = None):
    """One-dimensional rule on [lo, hi]; graded when it touches 0 and a scheme is given."""
    if hi < lo:
        raise QuadratureError("empty interval")
    if scheme is None:
        return gauss_rule(order).mapped(lo, hi)
    if lo > 0 or hi < 0:
        x, w = gauss_rule(order).mapped(lo, hi)
        return x, w * np.abs(x) ** scheme.gamma
    parts = []
    if lo < 0:
        x, w = _graded_half(-lo, scheme)
        parts.append((-x[::-1], w[::-1]))
    if hi > 0:
        parts.append(_graded_half(hi, scheme))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def tensor_rule(lo, hi, orders, scheme: GradedScheme | None = None):
    """Tensor-product rule on the box ``[lo, hi]``: nodes ``(N, d)``, weights ``(N,)``."""
    lo = np.atleast_1d(np.asarray(lo, float))
    hi = np.atleast_1d(np.asarray(hi, float))
    orders = np.broadcast_to(np.asarray(orders, int), lo.shape)
    axes = []
    for i, (a, b, k) in enumerate(zip(lo, hi, orders)):
        graded = scheme if scheme is not None and i == scheme.axis else None
        axes.append(axis_rule(a, b, int(k), graded))
    grids = np.meshgrid(*[x for x, _ in axes], indexing="ij")
    wgrids = np.meshgrid(*[w for _, w in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


def _check(values):
    if not np.all(np.isfinite(values)):
        raise QuadratureError("integrand returned a non-finite sample")
    return values


def integrate_box(lo, hi, integrand, orders=16):
    """Tensor Gauss integral of ``integrand(nodes)``; error from an order+4 rule."""
    orders = np.asarray(orders, int)
    nodes, weights = tensor_rule(lo, hi, orders)
    value = np.sum(weights * _check(integrand(nodes)))
    nodes2, weights2 = tensor_rule(lo, hi, np.minimum(orders + 4, MAX_ORDER))
    value2 = np.sum(weights2 * _check(integrand(nodes2)))
    return value, float(abs(value2 - value))


def integrate_graded(lo, hi, smooth_part, scheme: GradedScheme, orders=16):
    """Integral of ``|t1|**gamma * smooth_part(t)``; error from dropping one level."""
    nodes, weights = tensor_rule(lo, hi, orders, scheme)
    value = np.sum(weights * _check(smooth_part(nodes)))
    if scheme.levels > 1:
        coarse = GradedScheme(scheme.levels - 1, scheme.order, scheme.gamma, scheme.axis)
        n2, w2 = tensor_rule(lo, hi, orders, coarse)
        err = float(abs(np.sum(w2 * _check(smooth_part(n2))) - value))
    else:
        err = float("nan")
    return value, err
