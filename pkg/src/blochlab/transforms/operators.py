"""Bergman projection, modified Beurling transform and box diagnostics."""

import math

import numpy as np

from ..core.hyperbolic import HALF_PLANE, ball_points
from ..errors import ConvergenceError, DomainError
from ..quadrature import adaptive_cubature, gl_nodes
from .grids import NAdicBox

# initial cell edges for the compactified polar variables
_SIGMA_BREAKS = [10.0**-k for k in range(1, 9)] + [0.25, 0.5, 0.75]
_PHI_FRACTIONS = [1e-4, 1e-3, 1e-2, 0.05, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 0.95, 0.99, 0.999, 0.9999]


def _bergman_grid(level):
    """Polar nodes on the disk: GL panels graded towards ``|w| = 1``, trapezoid in angle."""
    panels = 6 + 2 * level
    m = 8 + 4 * level
    nt = 64 * 2**level
    edges = [0.0] + [1.0 - 2.0**-p for p in range(1, panels)] + [1.0]
    rho, wr = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gl_nodes(a, b, m)
        rho.append(x)
        wr.append(w)
    rho = np.concatenate(rho)
    wr = np.concatenate(wr)
    theta = 2 * np.pi * np.arange(nt) / nt
    W = (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
    # area element rho drho dtheta
    weights = ((wr * rho)[:, None] * np.full(nt, 2 * np.pi / nt)[None, :]).ravel()
    return W, weights


def bergman_project(mu, z, tol=1e-6, max_level=6, chunk=8):
    """``(1/pi) int_D mu(w) / (1 - z conj(w))^2 dA(w)`` for points ``z`` in the disk.

    The polar grid is refined in radius, order and angle together until two
    successive levels agree to ``tol`` at every point.  ``z`` may be a scalar
    or an array; the result has the same shape.
    """
    if mu.support != "disk":
        raise DomainError("the Bergman projection acts on coefficients supported on the disk")
    zs = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zs).ravel()
    if np.any(np.abs(flat) >= 1):
        raise DomainError("evaluation points must lie in the open disk")
    prev = None
    for level in range(max_level + 1):
        W, weights = _bergman_grid(level)
        mw = mu(W) * weights
        cw = np.conj(W)
        cur = np.empty(flat.shape, dtype=complex)
        for s in range(0, flat.size, chunk):
            zc = flat[s : s + chunk]
            K = (1.0 - zc[:, None] * cw[None, :]) ** -2
            cur[s : s + chunk] = (K @ mw) / math.pi
        if prev is not None and np.max(np.abs(cur - prev)) <= tol:
            return cur.reshape(zs.shape) if zs.ndim else complex(cur[0])
        prev = cur
    raise ConvergenceError("Bergman projection did not converge", previous=prev, current=cur)


def _check_point(z):
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("evaluation point must lie in the upper half-plane")
    return z


def _lower_support(mu):
    if mu.support == "disk":
        raise DomainError("the modified Beurling transform needs support in the lower half-plane")


def _polar_point(z, phi, sigma):
    y = z.imag
    s = np.abs(np.sin(phi))
    t = y / (sigma * s)
    return z + t * np.exp(1j * phi), s


def _phi_breaks(z):
    breaks = [math.pi * (1 + f) for f in _PHI_FRACTIONS]
    # directions of the convergence-term poles w = 0 and w = 1
    for p in (0.0, 1.0):
        a = math.atan2(-z.imag, p - z.real) % (2 * math.pi)
        breaks.append(a)
    return breaks


def _box_integral(mu, z, kernel, tol):
    total = 0.0j
    boxes = [NAdicBox.from_triple(t, reflected=True) for t in mu.params["boxes"]]
    share = tol / len(boxes)
    for bx in boxes:
        x0, x1 = bx.interval
        y0, y1 = bx.heights

        def f(x, v):
            w = x - 1j * v
            return mu(w) * kernel(w)

        res = adaptive_cubature(f, (x0, x1), (y0, y1), tol=share, order=8)
        if not res.converged:
            raise ConvergenceError("box cubature did not converge", current=res.value)
        total += res.value
    return total


def _periodic_integral(mu, z, kernel, tol, decay):
    """``int mu(w) K(w) dA`` over one period strip of a ``p``-periodic coefficient.

    ``kernel`` is the lattice sum of the kernel over the translates
    ``w + m p``; it decays like ``exp(-2 pi decay |Im(w - z)| / p)``, so the
    strip is cut at the depth where the tail is below ``tol / 10``.
    """
    p = float(mu.params["period"])
    bound = mu.bound if math.isfinite(mu.bound) else 1.0
    # |lattice kernel| <= c e^{-2 pi decay Y / p} for Y = |Im(w - z)| >= y
    c = 4.0 * (math.pi / p) ** (decay + 1)
    scale = bound * c * p * p / (2 * math.pi * decay)
    depth = max(p, p / (2 * math.pi * decay) * math.log(max(10.0 * scale / tol, 2.0)) - z.imag)
    breaks = [-depth * f for f in (0.5, 0.25, 0.1)] + [-p * 10.0**-k for k in range(1, 9)]
    breaks = [v for v in breaks if -depth < v < 0]

    def f(x, v):
        w = x + 1j * v
        return mu(w) * kernel(w - z)

    res = adaptive_cubature(f, (0.0, p), (-depth, 0.0), tol=tol, order=8, y_breaks=breaks)
    if not res.converged:
        raise ConvergenceError("periodic strip cubature did not converge", current=res.value)
    return res.value


def _lattice_cube(p):
    k = math.pi / p

    def K(u):
        # sum over m of (u + m p)^-3
        return k**3 * np.cos(k * u) / np.sin(k * u) ** 3

    return K


def _lattice_square(p):
    k = math.pi / p

    def K(u):
        # sum over m of (u + m p)^-2; the convergence term sums to zero
        return (k / np.sin(k * u)) ** 2

    return K


def beurling_derivative(mu, z, tol=1e-6, sigma_breaks=()):
    """``(S mu)'(z) = -(2/pi) int mu(w) (w - z)^-3 dA(w)`` for ``Im z > 0``.

    With ``w = z + t e^{i phi}`` and ``t = y / (sigma |sin phi|)`` the lower
    half-plane becomes ``[pi, 2 pi] x (0, 1]`` and

        (S mu)'(z) = -(2 / (pi y)) int int mu(w) e^{-3 i phi} |sin phi| dsigma dphi,

    a bounded integrand on a compact domain.  The real axis is ``sigma = 1``;
    for bounded coefficients a thin band below it is cut off with a rigorous
    bound on its contribution, which keeps grid-structured coefficients
    (edges accumulating at the axis) integrable.  Box-supported coefficients are
    integrated over their boxes directly, and periodic ones over one period
    strip against the lattice-summed kernel.
    """
    z = _check_point(z)
    _lower_support(mu)
    if mu.support == "boxes":
        I = _box_integral(mu, z, lambda w: (w - z) ** -3, tol * math.pi / 2)
        return -2.0 / math.pi * I
    if mu.params.get("period"):
        I = _periodic_integral(mu, z, _lattice_cube(float(mu.params["period"])), tol * math.pi / 2, 1.0)
        return -2.0 / math.pi * I
    y = z.imag
    scale = 2.0 / (math.pi * y)
    top = 1.0
    if math.isfinite(mu.bound) and mu.bound > 0:
        # the band |Im w| < eps contributes at most (2/pi) bound 2 eps / y^2;
        # cutting it keeps that tail below tol / 10
        eps = tol * math.pi * y * y / (40.0 * mu.bound)
        top = y / (y + eps)

    def f(phi, sigma):
        w, s = _polar_point(z, phi, sigma)
        return mu(w) * np.exp(-3j * phi) * s

    breaks = [t for t in list(_SIGMA_BREAKS) + list(sigma_breaks) if t < top]
    res = adaptive_cubature(
        f, (math.pi, 2 * math.pi), (0.0, top), tol=0.9 * tol / scale, order=8,
        x_breaks=_phi_breaks(z), y_breaks=breaks,
    )
    if not res.converged:
        raise ConvergenceError("Beurling derivative did not converge", current=-scale * res.value)
    return -scale * res.value


def beurling_quotient(mu, z, tol=1e-6, sigma_breaks=()):
    """``2 (S mu)'(z) / rho_H(z) = 2 Im(z) (S mu)'(z)``; at most ``8/pi`` in modulus when ``|mu| <= 1``."""
    z = _check_point(z)
    return 2.0 * z.imag * beurling_derivative(mu, z, tol / (2.0 * z.imag), sigma_breaks)


def _value_kernel(z):
    # (w - z)^-2 - 1/(w (w - 1)) over a common denominator, free of cancellation at infinity
    def K(w):
        return (w * (2 * z - 1) - z * z) / ((w - z) ** 2 * w * (w - 1))

    return K


def beurling_modified(mu, z, tol=1e-6):
    """Modified Beurling transform and its derivative at ``z``.

    ``S# mu(z) = -(1/pi) int mu(w) [(w - z)^-2 - 1/(w (w - 1))] dA(w)``.
    Returns ``(value, derivative)``.
    """
    z = _check_point(z)
    _lower_support(mu)
    deriv = beurling_derivative(mu, z, tol)
    K = _value_kernel(z)
    if mu.support == "boxes":
        return -_box_integral(mu, z, K, tol * math.pi) / math.pi, deriv
    if mu.params.get("period"):
        I = _periodic_integral(mu, z, _lattice_square(float(mu.params["period"])), tol * math.pi, 1.0)
        return -I / math.pi, deriv

    def f(phi, sigma):
        w, s = _polar_point(z, phi, sigma)
        # dA = t^2 / sigma dsigma dphi and K(w) = O(t^-3), so the product stays bounded
        t = z.imag / (sigma * s)
        return mu(w) * K(w) * t * t / sigma

    res = adaptive_cubature(
        f, (math.pi, 2 * math.pi), (0.0, 1.0), tol=tol * math.pi, order=8,
        x_breaks=_phi_breaks(z), y_breaks=_SIGMA_BREAKS,
    )
    if not res.converged:
        raise ConvergenceError("Beurling transform did not converge", current=-res.value / math.pi)
    return -res.value / math.pi, deriv


def locality_gap(mu1, mu2, z, R, tol=1e-5, check=True):
    """``|2 (S mu1)'/rho_H (z) - 2 (S mu2)'/rho_H (z)|`` for coefficients agreeing near ``conj(z)``.

    With ``check`` the agreement on ``B(conj z, R)`` is spot-checked on a
    sample of the ball before integrating the difference.
    """
    z = _check_point(z)
    if check:
        pts = np.conj(ball_points(z, R * (1 - 1e-9), HALF_PLANE, n_radial=8, n_angular=16))
        if np.max(np.abs(mu1(pts) - mu2(pts))) > 1e-12:
            raise DomainError(f"coefficients differ inside the ball of radius {R}")
    # on the ray straight down from z the ball boundary sits at these sigmas
    breaks = [1.0 / (1.0 + math.exp(R)), 1.0 / (1.0 + math.exp(-R))]
    return abs(beurling_quotient(mu1 - mu2, z, tol, breaks))


def box_average(b, box, tol=1e-8):
    """Mean of ``|2 y b'(z)|^2`` over a grid box for the measure ``dx dy / y``.

    Integrates in ``(x, log y)``, where that measure is Lebesgue, and divides
    by the weighted area ``|I| log n``.
    """
    if b.domain != HALF_PLANE:
        raise DomainError("box averages are defined for functions on the half-plane")
    x0, x1 = box.interval
    y0, y1 = box.heights
    area = box.weighted_area

    def f(x, t):
        y = np.exp(t)
        return np.abs(2 * y * b.derivative(x + 1j * y)) ** 2

    res = adaptive_cubature(f, (x0, x1), (math.log(y0), math.log(y1)), tol=tol * area, order=8, rtol=0.0)
    if not res.converged:
        raise ConvergenceError("box average did not converge", current=res.value.real / area)
    return float(res.value.real / area)
