"""Graph charts of the catalog boundaries and the test boxes S, S'.

A chart point ``t = (t1, t2, t3)`` stands for ``(x1, y1, x2)`` and is embedded
as ``(t1 + i t2, t3 + i g(t))`` where ``g`` solves ``rho = 0`` for ``y2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    BOUNDED_FAMILIES,
    MODEL_FAMILIES,
    SCALED_FAMILIES,
    DomainError,
    DomainSpec,
    Family,
    cpoint,
)

DEFAULT_A = 1.0 / 12.0
# boxes are only meaningful in the small-delta regime
MAX_DELTA = 0.5


class Side(str, enum.Enum):
    MODEL = "Model"
    LOWER = "Lower"
    UPPER = "Upper"


class ChartError(DomainError):
    pass


def _split(t):
    t = np.asarray(t, dtype=float)
    if t.shape[-1] != 3:
        raise ValueError("chart points need a trailing axis of length 3")
    return t[..., 0], t[..., 1], t[..., 2]


def _base(spec: DomainSpec, t1, t2, t3):
    """The part of rho independent of y2, for the bounded and scaled families."""
    if spec.family is Family.BOUNDED_QUAD:
        return t1**2 + t2**4 + t3**2
    if spec.family is Family.BOUNDED_POWER:
        return np.abs(t1) ** spec.m + t2**2 + t3**2
    e = spec.eps
    if spec.family is Family.SCALED_QUAD:
        return t1**2 + e**2 * (t2**4 + t3**2)
    m = spec.m
    return np.abs(t1) ** m + e ** (2 - m) * t2**2 + e**m * t3**2


@dataclass(frozen=True)
class Chart:
    spec: DomainSpec
    side: Side = Side.MODEL

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        fam = self.spec.family
        if fam in BOUNDED_FAMILIES and self.side is Side.MODEL:
            raise ChartError("bounded domains need a Lower or Upper chart")
        if fam not in BOUNDED_FAMILIES and self.side is not Side.MODEL:
            raise ChartError(f"{fam.value} has a single graph chart")

    def height(self, t):
        t1, t2, t3 = _split(t)
        spec = self.spec
        if spec.family in MODEL_FAMILIES:
            p = 2.0 if spec.family is Family.MODEL_QUAD else spec.m
            return 0.5 * np.abs(t1) ** p + 0 * t2 + 0 * t3
        c = _base(spec, t1, t2, t3)
        if spec.family in SCALED_FAMILIES:
            # root of eps^k y^2 - 2 y + c = 0 that tends to c/2 as eps -> 0
            ek = spec.eps**spec.kappa
            disc = 1.0 - ek * c
            if np.any(disc < 0):
                raise ChartError("chart point outside the graph range of the scaled domain")
            return c / (1.0 + np.sqrt(disc))
        disc = 1.0 - c
        if np.any(disc < 0):
            raise ChartError("chart point outside the base region")
        root = np.sqrt(disc)
        if self.side is Side.LOWER:
            return c / (1.0 + root)
        return 1.0 + root

    def embed(self, t):
        t1, t2, t3 = _split(t)
        return cpoint(t1 + 1j * t2, t3 + 1j * self.height(t))

    def height_gradient(self, t):
        """Gradient of ``g`` from the implicit function theorem."""
        grad = self.spec.real_gradient(self.embed(t))
        denom = grad[..., 3]
        if np.any(denom == 0):
            raise ChartError("chart degenerates (equator of a bounded domain)")
        return -grad[..., :3] / denom[..., None]

    def frame(self, t):
        """Tangent vectors d(embed)/dt_i as complex vectors, shape ``(..., 3, 2)``."""
        dg = self.height_gradient(t)
        one = np.ones_like(dg[..., 0])
        zero = np.zeros_like(one)
        x1 = np.stack([one + 0j, 1j * dg[..., 0]], axis=-1)
        x2 = np.stack([1j * one, 1j * dg[..., 1]], axis=-1)
        x3 = np.stack([zero + 0j, one + 1j * dg[..., 2]], axis=-1)
        return np.stack([x1, x2, x3], axis=-2)


def lift_model(spec: DomainSpec, t):
    if spec.family not in MODEL_FAMILIES:
        raise ChartError(f"lift_model needs a model family, got {spec.family.value}")
    return Chart(spec).embed(t)


def lift_scaled(spec: DomainSpec, t):
    if spec.family not in SCALED_FAMILIES:
        raise ChartError(f"lift_scaled needs a scaled family, got {spec.family.value}")
    return Chart(spec).embed(t)


def lift(spec: DomainSpec, t, side: Side = Side.MODEL):
    return Chart(spec, side).embed(t)


def atlas_bounded(spec: DomainSpec) -> list[Chart]:
    if spec.family not in BOUNDED_FAMILIES:
        raise ChartError("atlas_bounded needs a bounded family")
    return [Chart(spec, Side.LOWER), Chart(spec, Side.UPPER)]


@dataclass(frozen=True)
class SphereParam:
    """Global smooth parameterisation of the boundary of ``|z2 - i|^2 + x1^2 + y1^4 < 1``.

    With ``r(b) = cos b sqrt(1 + sin^2 b)`` the map
    ``(b, p, q) -> (r sin p cos q + i sin b, r sin p sin q + i (1 - r cos p))``
    covers the whole boundary, equator included, for
    ``b in [-pi/2, pi/2], p in [0, pi], q in [0, 2 pi)``.
    """

    spec: DomainSpec = field(default_factory=lambda: DomainSpec(Family.BOUNDED_QUAD))

    def __post_init__(self):
        if self.spec.family is not Family.BOUNDED_QUAD:
            raise ChartError("SphereParam covers BoundedQuad only")

    @staticmethod
    def _radius(b):
        s, c = np.sin(b), np.cos(b)
        r = c * np.sqrt(1 + s**2)
        dr = -s * np.sqrt(1 + s**2) + c**2 * s / np.sqrt(1 + s**2)
        return r, dr

    def embed(self, params):
        b, p, q = np.moveaxis(np.asarray(params, float), -1, 0)
        r, _ = self._radius(b)
        return cpoint(r * np.sin(p) * np.cos(q) + 1j * np.sin(b), r * np.sin(p) * np.sin(q) + 1j * (1 - r * np.cos(p)))

    def frame(self, params):
        b, p, q = np.moveaxis(np.asarray(params, float), -1, 0)
        r, dr = self._radius(b)
        sp, cp, sq, cq = np.sin(p), np.cos(p), np.sin(q), np.cos(q)
        xb = np.stack([dr * sp * cq + 1j * np.cos(b), dr * sp * sq - 1j * dr * cp], axis=-1)
        xp = np.stack([r * cp * cq + 0j, r * cp * sq + 1j * r * sp], axis=-1)
        xq = np.stack([-r * sp * sq + 0j, r * sp * cq + 0j], axis=-1)
        return np.stack([xb, xp, xq], axis=-2)


class BoxFamily(str, enum.Enum):
    QUAD = "quad"
    POWER = "power"


@dataclass(frozen=True)
class ParamBox:
    """Axis-aligned chart box; ``Sprime`` is the pair of slabs ``delta <= |t1| <= 2 delta``."""

    family: BoxFamily
    role: str
    delta: float
    a: float
    m: float | None
    h1: float
    h2: float
    h3: float

    def cells(self):
        """List of ``(lo, hi)`` boxes making up the set."""
        if self.role == "S":
            return [(np.array([-self.h1, -self.h2, -self.h3]), np.array([self.h1, self.h2, self.h3]))]
        d = self.delta
        return [
            (np.array([-2 * d, -self.h2, -self.h3]), np.array([-d, self.h2, self.h3])),
            (np.array([d, -self.h2, -self.h3]), np.array([2 * d, self.h2, self.h3])),
        ]

    def contains(self, t):
        t1, t2, t3 = _split(t)
        inner = (np.abs(t2) <= self.h2) & (np.abs(t3) <= self.h3)
        if self.role == "S":
            return inner & (np.abs(t1) <= self.h1)
        return inner & (np.abs(t1) >= self.delta) & (np.abs(t1) <= 2 * self.delta)

    def volume(self):
        return sum(float(np.prod(hi - lo)) for lo, hi in self.cells())

    def scaled(self, eps, kappa):
        """Image of the box under ``t -> (eps t1, eps t2, eps**kappa t3)``."""
        return _ScaledBox(self, eps, kappa)


@dataclass(frozen=True)
class _ScaledBox:
    box: ParamBox
    eps: float
    kappa: float

    @property
    def role(self):
        return self.box.role

    def cells(self):
        f = np.array([self.eps, self.eps, self.eps**self.kappa])
        return [(lo * f, hi * f) for lo, hi in self.box.cells()]


def make_boxes(family, delta: float, a: float = DEFAULT_A, m: float | None = None):
    """Return ``(S, Sprime)`` for the quadratic or power model."""
    family = BoxFamily(family)
    if not 0 < delta < 1:
        raise ChartError(f"delta must lie in (0, 1), got {delta}")
    if not 0 < a <= DEFAULT_A:
        raise ChartError(f"box constant a must lie in (0, 1/12], got {a}")
    if delta > MAX_DELTA:
        raise ChartError(f"delta={delta} leaves the small-delta regime (max {MAX_DELTA})")
    if family is BoxFamily.QUAD:
        if m is not None:
            raise ChartError("quadratic boxes take no exponent")
        h1, h2, h3 = a * delta**2, 0.5, a * delta**2
    else:
        if m is None or not 1 < m < 2:
            raise ChartError(f"power boxes need 1 < m < 2, got {m}")
        h1, h2, h3 = a * delta**2, delta ** (2 - m), a * delta**m
    if h1 >= delta:
        raise ChartError("S and S' overlap")
    s = ParamBox(family, "S", delta, a, m, h1, h2, h3)
    sp = ParamBox(family, "Sprime", delta, a, m, h1, h2, h3)
    return s, sp
