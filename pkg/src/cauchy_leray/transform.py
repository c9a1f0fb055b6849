"""Cauchy-Leray transform in C^2 (kernel ``Delta(w, z)^-2``) and L^p norms on chart boxes."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundary import Chart, SphereParam
from .geometry import SCALED_FAMILIES, as_points
from .measures import (
    LERAY_LEVI,
    MeasureKind,
    chart_rule,
    leray_levi_from_frame,
    transported_ll,
)
from .quadrature import gauss_rule, tensor_rule

SINGULAR_TOL = 1e-12
# z-points per work unit; fixed so that results never depend on the thread count
CHUNK = 32


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature budget for one transform evaluation."""

    orders: tuple = (16, 16, 16)
    levels: int = 12
    graded_order: int = 8
    outer_orders: tuple = (8, 8, 8)
    threads: int = 1


@dataclass
class BoundaryFunction:
    """Function on a chart: ``values(t)`` on the union of ``support`` cells.

    ``support`` is a list of ``(lo, hi)`` chart boxes; the function is taken to
    vanish outside it.  An empty support gives the zero function.
    """

    support: list
    values: Callable | None = None
    label: str = "custom"

    def __call__(self, t):
        t = np.asarray(t, float)
        if self.values is None:
            return np.ones(t.shape[:-1], dtype=complex)
        return np.asarray(self.values(t), dtype=complex)


def indicator(box) -> BoundaryFunction:
    return BoundaryFunction(list(box.cells()), None, f"indicator[{box.role}]")


def default_kind(chart: Chart) -> MeasureKind:
    if chart.spec.family in SCALED_FAMILIES:
        return transported_ll(chart.spec.eps)
    return LERAY_LEVI


def _apply(spec, w, weighted, z, threads):
    """Sum over nodes of ``Delta(w, z)^-2 * weighted`` for every row of ``z``."""
    g = spec.holo_gradient(w)
    z = np.atleast_2d(z)
    out = np.empty(len(z), dtype=complex)
    mins = np.empty(len(z))

    def work(start):
        zz = z[start : start + CHUNK]
        d = g[None, :, 0] * (w[None, :, 0] - zz[:, None, 0]) + g[None, :, 1] * (w[None, :, 1] - zz[:, None, 1])
        absd = np.abs(d)
        mins[start : start + len(zz)] = absd.min(axis=1) if d.shape[1] else np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            out[start : start + len(zz)] = (1.0 / d**2) @ weighted

    starts = range(0, len(z), CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)
    return out, mins


def cauchy_leray(chart: Chart, f: BoundaryFunction, z, kind: MeasureKind | None = None,
                 quad: QuadConfig = QuadConfig(), return_min_delta: bool = False):
    """``C(f)(z) = int Delta(w, z)^-2 f(w) dmu(w)`` over the support of ``f`` in ``chart``.

    On scaled domains the default measure is the transported Leray-Levi
    measure, which makes this the conjugated operator ``C_eps``.
    """
    z = as_points(z)
    shape = z.shape[:-1]
    z = z.reshape(-1, 2)
    kind = default_kind(chart) if kind is None else kind
    ws, wts = [], []
    for cell in f.support:
        nodes, w = chart_rule(chart, cell, kind, quad.orders, quad.levels, quad.graded_order)
        ws.append(nodes)
        wts.append(w * f(nodes))
    if not ws:
        out = np.zeros(len(z), dtype=complex)
        mins = np.full(len(z), np.inf)
    else:
        nodes = np.concatenate(ws)
        weighted = np.concatenate(wts)
        out, mins = _apply(chart.spec, chart.embed(nodes), weighted, z, quad.threads)
    if np.any(mins < SINGULAR_TOL):
        raise TransformError(f"kernel is singular: min |Delta| = {mins.min():.3e} near an evaluation point")
    out = out.reshape(shape)
    if return_min_delta:
        return out, float(mins.min()) if mins.size else np.inf
    return out


def cauchy_leray_on_chart(chart: Chart, f: BoundaryFunction, t, **kw):
    """Transform at boundary points given in chart coordinates (must avoid supp f)."""
    t = np.asarray(t, float)
    for lo, hi in f.support:
        inside = np.all((t >= lo) & (t <= hi), axis=-1)
        if np.any(inside):
            raise TransformError("evaluation point lies in the support of f")
    return cauchy_leray(chart, f, chart.embed(t), **kw)


def sphere_rule(n_b: int = 48, n_p: int = 48, n_q: int = 64):
    """Parameter nodes and Leray-Levi weights covering the whole of bD (BoundedQuad)."""
    param = SphereParam()
    xb, wb = gauss_rule(n_b).mapped(-np.pi / 2, np.pi / 2)
    xp, wp = gauss_rule(n_p).mapped(0.0, np.pi)
    xq = 2 * np.pi * np.arange(n_q) / n_q
    wq = np.full(n_q, 2 * np.pi / n_q)
    grid = np.stack(np.meshgrid(xb, xp, xq, indexing="ij"), axis=-1).reshape(-1, 3)
    wgt = (wb[:, None, None] * wp[None, :, None] * wq[None, None, :]).ravel()
    z = param.embed(grid)
    lam = leray_levi_from_frame(param.spec, z, param.frame(grid))
    return z, wgt * lam


def cauchy_leray_global(F: Callable, z, n_b: int = 48, n_p: int = 48, n_q: int = 64, threads: int = 1):
    """Transform of ``F|bD`` for BoundedQuad, integrating over the whole boundary.

    ``F`` takes an array of points of C^2 and returns complex values.
    Returns ``(values, kernel_evaluations)``.
    """
    z = np.atleast_2d(as_points(z))
    spec = SphereParam().spec
    if np.any(spec.rho(z) >= 0):
        raise TransformError("global evaluation needs points strictly inside the domain")
    w, lam = sphere_rule(n_b, n_p, n_q)
    out, mins = _apply(spec, w, lam * np.asarray(F(w), complex), z, threads)
    if np.any(mins < SINGULAR_TOL):
        raise TransformError("evaluation point on the boundary")
    return out, len(w) * len(z)


def lp_norm(g, cells, p: float, chart: Chart, kind: MeasureKind, quad: QuadConfig = QuadConfig(),
            outer: bool = False):
    """``(int |g|^p dmu)^(1/p)`` over the union of chart cells.

    ``g`` maps chart points to values.  ``outer=True`` uses the outer
    (evaluation-point) quadrature orders.
    """
    if not (np.isfinite(p) and p >= 1):
        raise TransformError(f"p must lie in [1, inf), got {p}")
    orders = quad.outer_orders if outer else quad.orders
    total = 0.0
    for cell in cells:
        nodes, w = chart_rule(chart, cell, kind, orders, quad.levels, quad.graded_order)
        total += float(np.sum(w * np.abs(g(nodes)) ** p))
    return total ** (1.0 / p)


def weighted_lp(values, weights, p: float) -> float:
    if not (np.isfinite(p) and p >= 1):
        raise TransformError(f"p must lie in [1, inf), got {p}")
    return float(np.sum(weights * np.abs(values) ** p)) ** (1.0 / p)


@dataclass
class BlowupData:
    """Outer nodes on S' with the transform of the indicator of S evaluated there."""

    chart: Chart
    s_box: object
    sp_box: object
    nodes: np.ndarray
    values: np.ndarray
    min_delta: float
    quad: QuadConfig
    _cache: dict = field(default_factory=dict, repr=False)

    def outer_weights(self, kind: MeasureKind):
        key = ("outer", kind)
        if key not in self._cache:
            ws = [chart_rule(self.chart, c, kind, self.quad.outer_orders)[1] for c in self.sp_box.cells()]
            self._cache[key] = np.concatenate(ws)
        return self._cache[key]

    def source_measure(self, kind: MeasureKind):
        key = ("source", kind)
        if key not in self._cache:
            q = self.quad
            self._cache[key] = sum(
                float(np.sum(chart_rule(self.chart, c, kind, q.orders, q.levels, q.graded_order)[1]))
                for c in self.s_box.cells()
            )
        return self._cache[key]

    def norms(self, p: float, kind: MeasureKind):
        """``(||C chi_S||_{L^p(S')}, ||chi_S||_{L^p})``."""
        num = weighted_lp(self.values, self.outer_weights(kind), p)
        den = self.source_measure(kind) ** (1.0 / p)
        return num, den

    def ratio(self, p: float, kind: MeasureKind) -> float:
        num, den = self.norms(p, kind)
        return num / den


def blowup_data(chart: Chart, s_box, sp_box, quad: QuadConfig = QuadConfig()) -> BlowupData:
    nodes = np.concatenate([tensor_rule(lo, hi, quad.outer_orders)[0] for lo, hi in sp_box.cells()])
    f = indicator(s_box)
    values, dmin = cauchy_leray(chart, f, chart.embed(nodes), quad=quad, return_min_delta=True)
    return BlowupData(chart, s_box, sp_box, nodes, values, dmin, quad)


def blowup_ratio(chart: Chart, s_box, sp_box, p: float, kind: MeasureKind,
                 quad: QuadConfig = QuadConfig()) -> float:
    """``||C(chi_S)||_{L^p(S', mu)} / ||chi_S||_{L^p(mu)}``."""
    return blowup_data(chart, s_box, sp_box, quad).ratio(p, kind)
