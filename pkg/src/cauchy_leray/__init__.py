"""Numerical experiments on the Cauchy-Leray integral for weakly convex domains in C^2."""

__version__ = "0.1.0"

from .boundary import Chart, Side, SphereParam, make_boxes  # noqa: E402
from .geometry import DomainError, DomainSpec, Family, delta  # noqa: E402
from .measures import LERAY_LEVI, SIGMA, MeasureKind, mu  # noqa: E402
from .transform import BoundaryFunction, QuadConfig, cauchy_leray, indicator  # noqa: E402

__all__ = [
    "BoundaryFunction",
    "Chart",
    "DomainError",
    "DomainSpec",
    "Family",
    "LERAY_LEVI",
    "MeasureKind",
    "QuadConfig",
    "SIGMA",
    "Side",
    "SphereParam",
    "cauchy_leray",
    "delta",
    "indicator",
    "make_boxes",
    "mu",
]
