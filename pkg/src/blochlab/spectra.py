"""Estimators for the asymptotic variance, integral means and LIL statistic,
and hyperbolic ball averages of the squared Bloch quotient.

The limsups in the definitions are not computable; every estimator reports
the value at the deepest parameter together with the whole per-step
sequence, and never claims an extrapolated limit.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import blochlib
from .core.hyperbolic import (
    DISK,
    HALF_PLANE,
    HyperbolicPoint,
    ball_points,
    disk_automorphism,
    disk_to_half_plane,
    distance,
    euclidean_radius,
    quotient_values,
)
from .errors import DomainError
from .quadrature import TRAPEZOID_BASE, adaptive_gl_1d, circle_trapezoid, gl_nodes


@dataclass
class VarianceEstimate:
    """Per-step values of a variance-type functional and the reported value."""

    value: float
    parameters: list
    per_step: list
    method: str
    converged: bool = True
    nodes: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def csv_rows(self):
        return [("parameter", "value")] + [(repr(float(p)), repr(float(v))) for p, v in zip(self.parameters, self.per_step)]


def _as_sequence(xs):
    if np.isscalar(xs):
        return [float(xs)]
    xs = [float(x) for x in xs]
    if not xs:
        raise DomainError("parameter schedule is empty")
    return xs


def _check_rs(rs):
    rs = _as_sequence(rs)
    for r in rs:
        if not 0.0 < r < 1.0:
            raise DomainError(f"radii must lie in (0, 1), got {r}")
    return rs


# -- asymptotic variance ----------------------------------------------------------


def variance_circle(b, rs, tol=1e-9, max_nodes=TRAPEZOID_BASE * 2**19):
    """``(1/(2 pi |log(1-r)|)) int_{|z|=r} |b|^2 |dz|`` for each ``r``.

    The circle mean is taken with the trapezoidal rule, doubling the node
    count until successive means agree to ``tol``; an unconverged step clears
    the ``converged`` flag instead of raising.
    """
    if b.domain != DISK:
        raise DomainError("variance_circle takes a disk function")
    rs = _check_rs(rs)
    steps, nodes, ok = [], [], True
    for r in rs:
        mean, n, conv = circle_trapezoid(lambda z: np.abs(b(z)) ** 2, r, tol=tol, max_nodes=max_nodes)
        steps.append(float(r * mean / abs(math.log1p(-r))))
        nodes.append(n)
        ok &= conv
    return VarianceEstimate(steps[-1], rs, steps, "circle", ok, nodes)


def _row_means(b, ys, x0=0.0, x1=1.0, tol=1e-10, n0=TRAPEZOID_BASE * 4, max_n=TRAPEZOID_BASE * 2**14):
    """Composite-trapezoid means over ``x in [x0, x1]`` of ``|2 y b'(x + i y)|^2``.

    For 1-periodic functions on ``[0, 1]`` this is the periodic trapezoidal
    rule.  Returns ``(means, converged)``.
    """
    ys = np.asarray(ys, dtype=float)

    def g(x):
        w = x[None, :] + 1j * ys[:, None]
        return np.abs(2.0 * ys[:, None] * b.derivative(w)) ** 2

    n = n0
    x = x0 + (x1 - x0) * np.arange(n + 1) / n
    vals = g(x)
    total = vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1])
    prev = total / n
    while n < max_n:
        xm = x0 + (x1 - x0) * (np.arange(n) + 0.5) / n
        total = total + g(xm).sum(axis=1)
        n *= 2
        cur = total / n
        if np.all(np.abs(cur - prev) <= tol * np.maximum(np.abs(cur), 1e-300)):
            return cur, True
        prev = cur
    return prev, False


def variance_strip(b, h, tol=1e-8):
    """``(1/|log h|) int_h^1 int_0^1 |2 b'/rho_H|^2 dx dy/y`` on the half-plane.

    In ``t = log y`` the weight ``dy/y`` becomes ``dt``; ``t`` is integrated by
    adaptive Gauss-Legendre starting from dyadic layers, ``x`` by the
    trapezoidal rule (spectrally accurate for 1-periodic ``b``).
    """
    if b.domain != HALF_PLANE:
        raise DomainError("variance_strip takes a half-plane function")
    hs = _as_sequence(h)
    for hh in hs:
        if not 0.0 < hh < 1.0:
            raise DomainError(f"h must lie in (0, 1), got {hh}")
    steps, ok = [], True
    for hh in hs:
        flags = []

        def F(t):
            m, conv = _row_means(b, np.exp(t))
            flags.append(conv)
            return m

        a = math.log(hh)
        layers = max(1, int(math.ceil(-a / math.log(2.0))))
        val, _, conv = adaptive_gl_1d(F, a, 0.0, tol=tol * max(1.0, -a), order=20, panels=layers)
        steps.append(float(val / abs(a)))
        ok &= conv and all(flags)
    return VarianceEstimate(steps[-1], hs, steps, "strip", ok)


# -- integral means and LIL ---------------------------------------------------------


@dataclass
class MeansProfile:
    tau: complex
    parameters: list
    per_step: list
    converged: bool = True

    @property
    def value(self):
        return self.per_step[-1]

    def csv_rows(self):
        return [("parameter", "value")] + [(repr(float(p)), repr(float(v))) for p, v in zip(self.parameters, self.per_step)]


def integral_means_profile(b, tau, rs, tol=1e-7, max_nodes=TRAPEZOID_BASE * 2**20):
    """Per-radius values of ``log(int_{|z|=r} |e^{tau b}| |dz|)/|log(1-r)|``.

    Works in log space: ``log|e^{tau b}| = Re(tau b)``, so large exponents do
    not overflow.
    """
    if b.domain != DISK:
        raise DomainError("integral means are taken on circles in the disk")
    rs = _check_rs(rs)
    tau = complex(tau)
    steps, ok = [], True
    for r in rs:
        if tau == 0:
            steps.append(math.log(2 * math.pi * r) / abs(math.log1p(-r)))
            continue

        def logf(z):
            v = (tau * b(z)).real
            if not np.all(np.isfinite(v)):
                raise OverflowError("exponent of e^{tau b} is not finite")
            return v

        logmean, _, conv = circle_trapezoid(logf, r, tol=tol, max_nodes=max_nodes, log_space=True)
        steps.append((math.log(2 * math.pi * r) + logmean) / abs(math.log1p(-r)))
        ok &= conv
    return MeansProfile(tau, rs, steps, ok)


def integral_means(b, tau, rs, **kw):
    """Value at the largest radius of :func:`integral_means_profile`.

    ``tau = 0`` returns 0: the spectrum vanishes at the origin, and the
    finite-``r`` term ``log(2 pi r)/|log(1-r)|`` tends to 0.
    """
    if complex(tau) == 0:
        return 0.0
    return integral_means_profile(b, tau, rs, **kw).value


def lil_statistic(b, theta, r):
    """``|b(r e^{i theta})| / sqrt(log(1/(1-r)) log log log(1/(1-r)))``."""
    if b.domain != DISK:
        raise DomainError("the LIL statistic is radial in the disk")
    r = float(r)
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    L = -math.log1p(-r)
    if L <= math.e:
        raise DomainError(f"r = {r} is too small: need log log log(1/(1-r)) > 0, i.e. r > 1 - e^-e")
    denom = math.sqrt(L * math.log(math.log(L)))
    return float(abs(b(r * np.exp(1j * theta)))) / denom


# -- ball averages ---------------------------------------------------------------------


def _disk_pullback(b, center):
    """Disk function ``g`` with ``g(0)`` at ``center`` and the same Bloch quotients."""
    if b.domain == DISK:
        phi, dphi = disk_automorphism(center.z)
    else:
        phi, dphi = disk_to_half_plane(center.z)
    return lambda z: b.derivative(phi(z)) * dphi(z)


def alpha_average(b, center=None, R=1.0, tol=1e-6, max_doublings=10):
    """Mean of ``|2b'/rho|^2`` over the hyperbolic ball ``B(center, R)``.

    The ball is pulled back to ``|z| < tanh(R/2)`` by an isometry, where the
    quantity becomes ``(1-r^2)/(pi r^2) int |g'|^2 dA``; polar Gauss-Legendre
    by trapezoid quadrature with doubling until the relative change is below
    ``tol``.
    """
    if center is None:
        center = HyperbolicPoint(0j if b.domain == DISK else 1j, b.domain)
    elif not isinstance(center, HyperbolicPoint):
        center = HyperbolicPoint(center, b.domain)
    if center.domain != b.domain:
        raise DomainError("ball centre and function live in different domains")
    if R <= 0:
        raise DomainError(f"ball radius must be positive, got {R}")
    r = euclidean_radius(R)
    if r >= 1.0:
        raise DomainError(f"hyperbolic radius {R} is too large for double precision")
    dg = _disk_pullback(b, center)
    m, n = 16, TRAPEZOID_BASE
    prev = None
    for _ in range(max_doublings):
        rho, w = gl_nodes(0.0, r, m)
        th = 2 * np.pi * np.arange(n) / n
        z = rho[:, None] * np.exp(1j * th)[None, :]
        vals = np.abs(dg(z)) ** 2
        integral = np.sum((vals.mean(axis=1) * 2 * np.pi) * rho * w)
        cur = float((1 - r * r) / (np.pi * r * r) * integral)
        if prev is not None and abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
        m, n = 2 * m, 2 * n
    return prev


@dataclass
class AlphaSearch:
    value: float
    label: str
    evaluated: int
    values: list = field(default_factory=list)


def _candidate(rng, kind):
    """One unit-ball candidate and a label."""
    if kind == 0:
        a = float(rng.uniform(0.0, 1.0))
        return blochlib.make_special(min(a, 0.999)), f"special:{a:.6f}"
    if kind == 1:
        a = float(rng.uniform(0.3, 0.8))
        c = complex(*rng.normal(size=2)) * 0.3
        if abs(c) > 0.9:
            c *= 0.9 / abs(c)
        return blochlib.compose_automorphism(blochlib.make_special(a), c, float(rng.uniform(0, 2 * np.pi))), f"special:{a:.6f} moved to {c:.4f}"
    if kind == 2:
        deg = int(rng.integers(1, 7))
        dc = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        dc *= rng.uniform(0.2, 1.0) ** np.arange(deg + 1)
        bound = blochlib.polynomial_norm_upper(dc)
        dc = dc / bound
        coeffs = np.concatenate([[0j], dc / np.arange(1, deg + 2)])
        return blochlib.polynomial(coeffs), f"poly b' degree {deg}"
    a1, a2 = rng.uniform(0.3, 0.75, size=2)
    t = float(rng.uniform(0, 1))
    f = t * blochlib.make_special(float(a1)) + (1 - t) * blochlib.make_special(float(a2))
    return f, f"{t:.3f} special:{a1:.4f} + {1 - t:.3f} special:{a2:.4f}"


def alpha_search(R, budget, seed=0, norm_samples=1500):
    """Randomised lower bound for ``alpha(R)`` with the winning candidate.

    Candidates are the identity, special functions (also recentred by disk
    automorphisms, which preserve the Bloch norm), polynomials whose
    derivative is scaled by a rigorous norm upper bound, and convex
    combinations of special functions.  Each candidate's sampled norm is
    checked; any candidate sampling above 1 is rescaled by that value.
    Randomness comes from one seed, split per candidate.
    """
    budget = int(budget)
    if budget < 1:
        raise DomainError("alpha search needs a budget of at least one candidate")
    children = np.random.SeedSequence(seed).spawn(budget)
    best, best_label, values = -math.inf, "", []
    for i in range(budget):
        if i == 0:
            f, label = blochlib.identity(), "z"
        else:
            rng = np.random.default_rng(children[i])
            f, label = _candidate(rng, int(rng.integers(0, 4)))
            norm = blochlib.bloch_norm_estimate(f, norm_samples, refine=2)
            if norm > 1.0:
                f = f * (1.0 / norm)
        v = alpha_average(f, HyperbolicPoint(0j), R)
        values.append(v)
        if v > best:
            best, best_label = v, label
    return AlphaSearch(best, best_label, budget, values)


def alpha_sup_estimate(R, budget, seed=0):
    """Lower bound for ``alpha(R)``: best ball average over a random candidate family."""
    return alpha_search(R, budget, seed).value


# -- small quotient balls --------------------------------------------------------------


@dataclass
class BallWitness:
    """A ball ``B(point, radius)`` on whose samples the Bloch quotient is below 1/2."""

    point: complex
    radius: float
    found: bool
    message: str = ""
    max_quotient: float = float("nan")


def small_quotient_ball_search(b, center, R, threshold=0.5, n_radial=40, n_angular=64, candidates=256, levels=24):
    """Search ``B(center, R)`` for a sub-ball where the sampled quotient stays below ``threshold``.

    Candidate centres are the lowest-quotient samples of the big ball; for each
    the radius is shrunk geometrically from the largest admissible value
    until all samples of the sub-ball pass.  The largest passing radius wins.
    When nothing passes, a witness with ``found=False`` is returned.
    """
    if not isinstance(center, HyperbolicPoint):
        center = HyperbolicPoint(center, b.domain)
    if R <= 0:
        raise DomainError(f"ball radius must be positive, got {R}")
    pts = ball_points(center.z, R, b.domain, n_radial, n_angular)
    q = quotient_values(b, pts)
    order = np.argsort(q, kind="stable")
    dom = DISK if b.domain == DISK else "half-plane"
    best = None
    for idx in order[:candidates]:
        if q[idx] >= threshold:
            break
        zeta = complex(pts[idx])
        s_max = R - float(distance(center.z, zeta, dom))
        if s_max <= 1e-9 * R or (best is not None and s_max <= best.radius):
            continue
        S = s_max
        for _ in range(levels):
            sub = ball_points(zeta, S, b.domain, 8, 24)
            qs = quotient_values(b, sub)
            if np.all(qs < threshold):
                if best is None or S > best.radius:
                    best = BallWitness(zeta, S, True, "", float(np.max(qs)))
                break
            S *= 0.7
            if best is not None and S <= best.radius:
                break
    if best is None:
        return BallWitness(center.z, 0.0, False, f"no witness at resolution {n_radial}x{n_angular}")
    return best
