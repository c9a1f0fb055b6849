"""Boundary measure densities: Lebesgue, Leray-Levi, the mu_a family and their
transported versions on the dilated domains.

The Leray-Levi density is the pull-back of ``(2 pi i)^-2 d rho ^ dbar d rho``
to the chart frame.  For ``mu_a`` the Levi-determinant ratio is normalised as
``L/|grad rho| := 4 pi^2 * lambda/sigma``, so ``a = 0`` gives sigma and
``a = 1`` gives ``4 pi^2 lambda``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import Chart, ChartError, Side
from .geometry import (
    BOUNDED_FAMILIES,
    SCALED_FAMILIES,
    DomainError,
    DomainSpec,
    Family,
)
from .quadrature import GradedScheme, tensor_rule

FOUR_PI2 = 4.0 * np.pi**2
IMAG_TOL = 1e-10


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class MeasureKind:
    """``sigma``, ``leray_levi``, ``mu`` (with ``a``); ``eps`` marks the transported variants."""

    kind: str
    a: float | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.kind not in {"sigma", "leray_levi", "mu"}:
            raise MeasureError(f"unknown measure kind {self.kind!r}")
        if self.kind == "mu" and self.a is None:
            raise MeasureError("mu_a needs an exponent a")
        if self.eps is not None and self.eps <= 0:
            raise MeasureError("transport parameter must be positive")

    @property
    def exponent(self) -> float:
        """The ``a`` in ``(L/|grad rho|)^a dsigma``."""
        return {"sigma": 0.0, "leray_levi": 1.0}.get(self.kind, self.a)

    @property
    def transported(self) -> bool:
        return self.eps is not None

    def __str__(self):
        if self.kind == "mu":
            name = f"MuA({self.a:g})"
        else:
            name = {"sigma": "Sigma", "leray_levi": "LerayLevi"}[self.kind]
        return f"Transported{name}(eps={self.eps:g})" if self.transported else name


SIGMA = MeasureKind("sigma")
LERAY_LEVI = MeasureKind("leray_levi")


def mu(a: float) -> MeasureKind:
    return MeasureKind("mu", a=a)


def transported_ll(eps: float) -> MeasureKind:
    return MeasureKind("leray_levi", eps=eps)


def transported_mu(a: float, eps: float) -> MeasureKind:
    return MeasureKind("mu", a=a, eps=eps)


def pullback_form(hgrad, hess, frame):
    """``(d rho ^ dbar d rho)(X1, X2, X3)`` for complex frame vectors ``(..., 3, 2)``."""

    def alpha(x):
        return np.sum(hgrad * x, axis=-1)

    def beta(x, y):
        # sum_jk H_jk (conj(x_j) y_k - conj(y_j) x_k)
        return np.einsum("...j,...jk,...k->...", np.conj(x), hess, y) - np.einsum(
            "...j,...jk,...k->...", np.conj(y), hess, x
        )

    x1, x2, x3 = frame[..., 0, :], frame[..., 1, :], frame[..., 2, :]
    return alpha(x1) * beta(x2, x3) - alpha(x2) * beta(x1, x3) + alpha(x3) * beta(x1, x2)


def leray_levi_from_frame(spec, z, frame):
    """Leray-Levi density relative to the parameters spanning ``frame``."""
    value = pullback_form(spec.holo_gradient(z), spec.complex_hessian(z), frame) / (2j * np.pi) ** 2
    scale = np.maximum(np.abs(value), 1e-300)
    if np.any(np.abs(value.imag) > IMAG_TOL * np.maximum(scale, 1.0)):
        raise MeasureError("pull-back of the Leray-Levi form is not real")
    return np.abs(value.real)


def sigma_density(chart: Chart, t):
    dg = chart.height_gradient(t)
    return np.sqrt(1.0 + np.sum(dg**2, axis=-1))


def leray_levi_density(chart: Chart, t):
    z = chart.embed(t)
    return leray_levi_from_frame(chart.spec, z, chart.frame(t))


def mu_a_density(chart: Chart, t, a: float):
    sig = sigma_density(chart, t)
    if a == 0:
        return sig
    lam = leray_levi_density(chart, t)
    return (FOUR_PI2 * lam / sig) ** a * sig


def base_chart(spec: DomainSpec) -> Chart:
    """Lower chart of the bounded domain whose dilation gives ``spec``."""
    if spec.family not in SCALED_FAMILIES:
        raise MeasureError("transported measures live on scaled domains")
    fam = Family.BOUNDED_QUAD if spec.family is Family.SCALED_QUAD else Family.BOUNDED_POWER
    return Chart(DomainSpec(fam, m=spec.m), Side.LOWER)


def to_base(t, eps: float, kappa: float):
    return np.asarray(t, float) * np.array([eps, eps, eps**kappa])


def transported_density(chart: Chart, t, kind: MeasureKind):
    """Density of the transported measure in the chart of a dilated domain.

    The pushforward normalised by ``eps^(a(2-kappa) - 2 - kappa)`` has density
    ``eps^(a(2-kappa)) * mu_a^base(eps t1, eps t2, eps^kappa t3)``.
    """
    spec = chart.spec
    if spec.family not in SCALED_FAMILIES:
        raise MeasureError("transported measures live on scaled domains")
    if kind.eps is None or kind.eps != spec.eps:
        raise MeasureError("transport parameter does not match the domain's eps")
    a = kind.exponent
    kappa = spec.kappa
    base = base_chart(spec)
    s = to_base(t, spec.eps, kappa)
    try:
        if kind.kind == "leray_levi":
            dens = leray_levi_density(base, s)
        else:
            dens = mu_a_density(base, s, a)
    except ChartError as exc:
        raise MeasureError("base point leaves the chart") from exc
    return spec.eps ** (a * (2.0 - kappa)) * dens


def density(chart: Chart, t, kind: MeasureKind):
    if kind.transported:
        return transported_density(chart, t, kind)
    if kind.kind == "sigma":
        return sigma_density(chart, t)
    if kind.kind == "leray_levi":
        return leray_levi_density(chart, t)
    return mu_a_density(chart, t, kind.a)


def singular_exponent(spec: DomainSpec, kind: MeasureKind) -> float:
    """Exponent ``gamma`` with density ~ ``|t1|^gamma`` near ``t1 = 0``."""
    if not spec.is_power:
        return 0.0
    return (spec.m - 2.0) * kind.exponent


def check_integrable(spec: DomainSpec, kind: MeasureKind):
    gamma = singular_exponent(spec, kind)
    if gamma <= -1:
        raise MeasureError(
            f"{kind} has density ~|t1|^{gamma:g} near t1 = 0, not integrable (needs a < 1/(2-m))"
        )
    return gamma


def chart_rule(chart: Chart, cell, kind: MeasureKind, orders=16, levels=12, graded_order=8):
    """Nodes and measure weights on one chart cell.

    Cells touching ``t1 = 0`` on power families are graded toward the
    singular plane; the returned weights are full measure weights.
    """
    lo, hi = cell
    spec = chart.spec
    gamma = check_integrable(spec, kind)
    touches = lo[0] <= 0 <= hi[0]
    if spec.is_power and touches:
        scheme = GradedScheme(levels=levels, order=graded_order, gamma=gamma)
        nodes, w = tensor_rule(lo, hi, orders, scheme)
        smooth = density(chart, nodes, kind) * np.abs(nodes[:, 0]) ** (-gamma)
        return nodes, w * smooth
    nodes, w = tensor_rule(lo, hi, orders)
    return nodes, w * density(chart, nodes, kind)


def box_measure(box, chart: Chart, kind: MeasureKind, orders=16, levels=12, graded_order=8):
    """Measure of a box (or union of cells) by quadrature."""
    total = 0.0
    for cell in box.cells():
        _, w = chart_rule(chart, cell, kind, orders, levels, graded_order)
        total += float(np.sum(w))
    return total
