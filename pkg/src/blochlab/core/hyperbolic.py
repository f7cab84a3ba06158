"""Hyperbolic geometry of the unit disk and the upper half-plane.

Densities follow the Bloch-space normalisations: ``2/(1-|z|^2)`` on the disk
and ``1/y`` on the half-plane, so the Bloch quotient ``|2 b'/rho|`` is
``(1-|z|^2)|b'|`` and ``2y|b'|`` respectively.  Both metrics have curvature
-1 and the Cayley map is an isometry between them.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

DISK = "disk"
HALF_PLANE = "half-plane"
DOMAINS = (DISK, HALF_PLANE)


@dataclass(frozen=True)
class HyperbolicPoint:
    z: complex
    domain: str = DISK

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        check_domain(self.domain)
        if not in_domain(self.z, self.domain):
            raise DomainError(f"{self.z} is not an interior point of the {self.domain}")

    @property
    def density(self):
        return float(density(self.z, self.domain))


def check_domain(domain):
    if domain not in DOMAINS:
        raise DomainError(f"unknown domain {domain!r}; expected one of {DOMAINS}")


def in_domain(z, domain):
    z = np.asarray(z)
    if domain == DISK:
        return bool(np.all(np.abs(z) < 1))
    return bool(np.all(z.imag > 0))


def density(z, domain=DISK):
    """Hyperbolic density ``rho`` (vectorised)."""
    z = np.asarray(z, dtype=complex)
    if domain == DISK:
        return 2.0 / (1.0 - np.abs(z) ** 2)
    return 1.0 / z.imag


def hyperbolic_radius(r):
    """Distance from 0 to ``r`` in the disk: ``log((1+r)/(1-r))``."""
    r = float(r)
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {r}")
    return 2.0 * np.arctanh(r)


def euclidean_radius(R):
    """Inverse of :func:`hyperbolic_radius`."""
    if R < 0:
        raise DomainError(f"hyperbolic radius must be non-negative, got {R}")
    return float(np.tanh(R / 2.0))


def hyperbolic_area_disk(r):
    """Hyperbolic area ``4 pi r^2/(1-r^2)`` of the disk ``|z| <= r``."""
    r = float(r)
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius must lie in [0, 1), got {r}")
    return 4.0 * np.pi * r * r / (1.0 - r * r)


def distance(z, w, domain=DISK):
    """Hyperbolic distance (vectorised).

    On the half-plane this also serves the lower half-plane, using ``|Im|``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if domain == DISK:
        t = np.abs(z - w) / np.abs(1.0 - np.conj(z) * w)
        with np.errstate(divide="ignore"):
            return 2.0 * np.arctanh(np.minimum(t, 1.0))
    # both points moved to the upper half-plane; sinh(d/2) = |z - w| / (2 sqrt(y y'))
    zz = z.real + 1j * np.abs(z.imag)
    ww = w.real + 1j * np.abs(w.imag)
    return 2.0 * np.arcsinh(np.abs(zz - ww) / (2.0 * np.sqrt(zz.imag) * np.sqrt(ww.imag)))


def bloch_quotient(b, z):
    """``|2 b'(z)/rho(z)|``: ``(1-|z|^2)|b'(z)|`` on the disk, ``2 Im z |b'(z)|`` on H."""
    if not isinstance(z, HyperbolicPoint):
        z = HyperbolicPoint(z, b.domain)
    if z.domain != b.domain:
        raise DomainError(f"point lives in the {z.domain}, function in the {b.domain}")
    return float(quotient_values(b, z.z))


def quotient_values(b, z):
    """Vectorised Bloch quotient; no domain checks."""
    z = np.asarray(z, dtype=complex)
    d = np.abs(b.derivative(z))
    if b.domain == DISK:
        return d * (1.0 - np.abs(z) ** 2)
    return 2.0 * z.imag * d


# -- isometries ---------------------------------------------------------------


def disk_automorphism(c, theta=0.0):
    """``phi(z) = e^{i theta} (z + c)/(1 + conj(c) z)``, sending 0 to ``e^{i theta} c``.

    Returns ``(phi, dphi)``.
    """
    c = complex(c)
    if abs(c) >= 1:
        raise DomainError(f"automorphism centre must lie in the disk, got {c}")
    rot = np.exp(1j * theta)

    def phi(z):
        z = np.asarray(z, dtype=complex)
        return rot * (z + c) / (1.0 + np.conj(c) * z)

    def dphi(z):
        z = np.asarray(z, dtype=complex)
        return rot * (1.0 - abs(c) ** 2) / (1.0 + np.conj(c) * z) ** 2

    return phi, dphi


def disk_to_half_plane(center):
    """Isometry ``T: D -> H`` with ``T(0) = center``; returns ``(T, dT)``."""
    center = complex(center)
    if center.imag <= 0:
        raise DomainError(f"half-plane centre must have Im > 0, got {center}")
    x0, y0 = center.real, center.imag

    def T(z):
        z = np.asarray(z, dtype=complex)
        return x0 + y0 * 1j * (1.0 + z) / (1.0 - z)

    def dT(z):
        z = np.asarray(z, dtype=complex)
        return y0 * 2j / (1.0 - z) ** 2

    return T, dT


def cayley(w):
    """``H -> D``, ``w -> (w - i)/(w + i)``."""
    w = np.asarray(w, dtype=complex)
    return (w - 1j) / (w + 1j)


def inverse_cayley(z):
    z = np.asarray(z, dtype=complex)
    return 1j * (1.0 + z) / (1.0 - z)


def ball_points(center, R, domain, n_radial=12, n_angular=24):
    """Sample points of the hyperbolic ball ``B(center, R)``.

    Points are placed on geodesic circles of evenly spaced hyperbolic radius
    and pushed forward from a ball centred at the origin of the disk.
    """
    r = euclidean_radius(R)
    rho = np.tanh(np.linspace(0.0, R, n_radial + 1)[1:] / 2.0)
    rho = rho[rho <= r]
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    pts = np.concatenate([[0.0 + 0j], (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()])
    if domain == DISK:
        phi, _ = disk_automorphism(center)
    else:
        phi, _ = disk_to_half_plane(center)
    return phi(pts)
