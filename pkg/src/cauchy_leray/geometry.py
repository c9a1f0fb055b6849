"""Defining functions of the catalog domains in C^2 and the Leray denominator.

Points of C^2 are complex arrays whose last axis has length 2, so every
function here is vectorised over leading axes.  The sign convention is fixed
throughout the package: ``rho < 0`` inside the domain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Family(str, enum.Enum):
    MODEL_QUAD = "ModelQuad"
    MODEL_POWER = "ModelPower"
    BOUNDED_QUAD = "BoundedQuad"
    BOUNDED_POWER = "BoundedPower"
    SCALED_QUAD = "ScaledQuad"
    SCALED_POWER = "ScaledPower"


POWER_FAMILIES = {Family.MODEL_POWER, Family.BOUNDED_POWER, Family.SCALED_POWER}
SCALED_FAMILIES = {Family.SCALED_QUAD, Family.SCALED_POWER}
MODEL_FAMILIES = {Family.MODEL_QUAD, Family.MODEL_POWER}
BOUNDED_FAMILIES = {Family.BOUNDED_QUAD, Family.BOUNDED_POWER}


class DomainError(ValueError):
    """Invalid domain parameters or evaluation on a singular locus."""


def signed_power(u, q):
    """Odd extension ``|u|**q * sign(u)`` of the power function."""
    if np.any(np.asarray(q) <= 0):
        raise DomainError("signed_power needs q > 0")
    u = np.asarray(u, dtype=float)
    return np.sign(u) * np.abs(u) ** q


def as_points(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != 2:
        raise ValueError("points of C^2 need a trailing axis of length 2")
    return z


def cpoint(z1, z2) -> np.ndarray:
    """Stack two complex coordinates into a point (or array of points)."""
    return np.stack(np.broadcast_arrays(np.asarray(z1, complex), np.asarray(z2, complex)), axis=-1)


@dataclass(frozen=True)
class DomainSpec:
    """One of the catalog domains.

    ``m`` is the exponent of the power families (1 < m < 2) and ``eps`` the
    dilation parameter of the scaled families.  The scaled domains are the
    images of the bounded ones under the inverse anisotropic dilation, with
    defining function ``eps**-kappa * rho(tau_eps z)`` where ``kappa`` is 2
    for the quadratic family and ``m`` for the power family.
    """

    family: Family
    m: float | None = None
    eps: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family in POWER_FAMILIES:
            if self.m is None:
                raise DomainError(f"{self.family.value} requires an exponent m")
            if not 1.0 < self.m < 2.0:
                raise DomainError(f"m must lie in (1, 2), got {self.m}")
        elif self.m is not None:
            raise DomainError(f"{self.family.value} takes no exponent m")
        if self.family in SCALED_FAMILIES:
            if self.eps is None:
                raise DomainError(f"{self.family.value} requires eps")
            if not self.eps > 0:
                raise DomainError(f"eps must be positive, got {self.eps}")
        elif self.eps is not None:
            raise DomainError(f"{self.family.value} takes no eps")

    @property
    def is_power(self) -> bool:
        return self.family in POWER_FAMILIES

    @property
    def kappa(self) -> float:
        """Weight of z2 in the dilation ``tau_eps(z) = (eps z1, eps**kappa z2)``."""
        return self.m if self.is_power else 2.0

    # -- real-variable pieces -------------------------------------------------
    # Every catalog function is separable: rho = f1(x1) + f2(y1) + f3(x2) + f4(y2).

    def _parts(self, x1, y1, x2, y2):
        f = self.family
        if f is Family.MODEL_QUAD:
            return x1**2, 0 * y1, 0 * x2, -2 * y2
        if f is Family.MODEL_POWER:
            return np.abs(x1) ** self.m, 0 * y1, 0 * x2, -2 * y2
        if f is Family.BOUNDED_QUAD:
            return x1**2, y1**4, x2**2, y2**2 - 2 * y2
        if f is Family.BOUNDED_POWER:
            return np.abs(x1) ** self.m, y1**2, x2**2, y2**2 - 2 * y2
        e = self.eps
        if f is Family.SCALED_QUAD:
            return x1**2, e**2 * y1**4, e**2 * x2**2, e**2 * y2**2 - 2 * y2
        m = self.m
        return np.abs(x1) ** m, e ** (2 - m) * y1**2, e**m * x2**2, e**m * y2**2 - 2 * y2

    def _first(self, x1, y1, x2, y2):
        f = self.family
        if self.is_power:
            d1 = self.m * signed_power(x1, self.m - 1)
        else:
            d1 = 2 * x1
        if f in MODEL_FAMILIES:
            return d1, 0 * y1, 0 * x2, -2 + 0 * y2
        if f is Family.BOUNDED_QUAD:
            return d1, 4 * y1**3, 2 * x2, 2 * y2 - 2
        if f is Family.BOUNDED_POWER:
            return d1, 2 * y1, 2 * x2, 2 * y2 - 2
        e = self.eps
        if f is Family.SCALED_QUAD:
            return d1, 4 * e**2 * y1**3, 2 * e**2 * x2, 2 * e**2 * y2 - 2
        m = self.m
        return d1, 2 * e ** (2 - m) * y1, 2 * e**m * x2, 2 * e**m * y2 - 2

    def _second(self, x1, y1, x2, y2):
        f = self.family
        if self.is_power:
            if np.any(x1 == 0):
                raise DomainError("complex Hessian is singular on x1 = 0 for power families")
            d1 = self.m * (self.m - 1) * np.abs(x1) ** (self.m - 2)
        else:
            d1 = 2 + 0 * x1
        if f in MODEL_FAMILIES:
            return d1, 0 * y1, 0 * x2, 0 * y2
        if f is Family.BOUNDED_QUAD:
            return d1, 12 * y1**2, 2 + 0 * x2, 2 + 0 * y2
        if f is Family.BOUNDED_POWER:
            return d1, 2 + 0 * y1, 2 + 0 * x2, 2 + 0 * y2
        e = self.eps
        if f is Family.SCALED_QUAD:
            return d1, 12 * e**2 * y1**2, 2 * e**2 + 0 * x2, 2 * e**2 + 0 * y2
        m = self.m
        return d1, 2 * e ** (2 - m) + 0 * y1, 2 * e**m + 0 * x2, 2 * e**m + 0 * y2

    @staticmethod
    def _coords(z):
        z = as_points(z)
        return z[..., 0].real, z[..., 0].imag, z[..., 1].real, z[..., 1].imag

    # -- public surface -------------------------------------------------------

    def rho(self, z):
        return sum(self._parts(*self._coords(z)))

    def real_gradient(self, z):
        """Gradient of rho in R^4 ordered (x1, y1, x2, y2)."""
        return np.stack(np.broadcast_arrays(*self._first(*self._coords(z))), axis=-1)

    def holo_gradient(self, z):
        g = self.real_gradient(z)
        return np.stack([(g[..., 0] - 1j * g[..., 1]) / 2, (g[..., 2] - 1j * g[..., 3]) / 2], axis=-1)

    def complex_hessian(self, z):
        """Matrix ``H[j, k] = d^2 rho / dzbar_j dz_k`` (diagonal for the catalog)."""
        a, b, c, d = np.broadcast_arrays(*self._second(*self._coords(z)))
        h = np.zeros(a.shape + (2, 2), dtype=complex)
        h[..., 0, 0] = (a + b) / 4
        h[..., 1, 1] = (c + d) / 4
        return h


@dataclass(frozen=True)
class AffineImage:
    """Domain ``{U z + b : z in base}`` with defining function ``rho(U^-1 (zeta - b))``.

    Used to check translation and unitary invariance of the Leray denominator;
    the holomorphic chain rule gives ``d(rho o A^-1) = U^-T d rho``.
    """

    base: DomainSpec
    unitary: np.ndarray
    shift: np.ndarray

    def _pull(self, zeta):
        uinv = np.linalg.inv(self.unitary)
        return (as_points(zeta) - self.shift) @ uinv.T

    def rho(self, zeta):
        return self.base.rho(self._pull(zeta))

    def holo_gradient(self, zeta):
        uinv = np.linalg.inv(self.unitary)
        return self.base.holo_gradient(self._pull(zeta)) @ uinv

    def complex_hessian(self, zeta):
        uinv = np.linalg.inv(self.unitary)
        h = self.base.complex_hessian(self._pull(zeta))
        return np.conj(uinv).T @ h @ uinv


def rho(spec, z):
    return spec.rho(z)


def holo_gradient(spec, z):
    return spec.holo_gradient(z)


def complex_hessian(spec, z):
    return spec.complex_hessian(z)


def delta(spec, w, z):
    """Leray denominator ``<d rho(w), w - z>`` (bilinear, no conjugation)."""
    w = as_points(w)
    z = as_points(z)
    return np.sum(spec.holo_gradient(w) * (w - z), axis=-1)


def delta0_quad_closed(w_t, z_t):
    """Closed form of the denominator on the boundary of ``2 Im z2 > x1^2``."""
    u1, v1, u2 = np.moveaxis(np.asarray(w_t, float), -1, 0)
    x1, y1, x2 = np.moveaxis(np.asarray(z_t, float), -1, 0)
    return 0.5 * ((u1 - x1) ** 2 + 2j * (u1 * (v1 - y1) + u2 - x2))


def delta0_power_closed(w_t, z_t, m):
    """Closed form of the denominator on the boundary of ``2 Im z2 > |x1|^m``."""
    if not 1.0 < m < 2.0:
        raise DomainError(f"m must lie in (1, 2), got {m}")
    u1, v1, u2 = np.moveaxis(np.asarray(w_t, float), -1, 0)
    x1, y1, x2 = np.moveaxis(np.asarray(z_t, float), -1, 0)
    bracket = m * signed_power(u1, m - 1)
    re = 0.5 * (np.abs(x1) ** m - np.abs(u1) ** m + bracket * (u1 - x1))
    im = 0.5 * bracket * (v1 - y1) + (u2 - x2)
    return re + 1j * im


def tau(z, eps, kappa=2.0):
    """Anisotropic dilation ``(z1, z2) -> (eps z1, eps**kappa z2)``."""
    z = as_points(z)
    return z * np.array([eps, eps**kappa])


def random_unitary(rng) -> np.ndarray:
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))
