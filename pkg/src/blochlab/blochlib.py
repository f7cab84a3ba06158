"""Concrete Bloch functions, Taylor coefficients of b', and coefficient bounds.

A :class:`BlochFunction` is a pair of vectorised evaluators ``b`` and ``b'``
tagged with its domain.  Functions on the disk can be expanded as

    b'(z) = q_0 + q_1 z + q_2 z^2 + ...

and :func:`derivative_coefficients` extracts ``q_k`` by the trapezoidal rule
on a circle.  The mini-language understood by :func:`parse_function_spec` is

    special:<a>        (3/4) sqrt(3) ((z + a)/(1 + a z))^2, 0 <= a < 1
    lacunary:<base>    sum_{k<=K} z^(base^k)   (optionally lacunary:<base>:<K>)
    poly:<c0,c1,...>   c0 + c1 z + c2 z^2 + ...
    logmap             log(1/(1 - z)) on the disk
    logz               log z on the upper half-plane
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .core.hyperbolic import DISK, HALF_PLANE, check_domain, cayley, disk_automorphism, inverse_cayley, quotient_values
from .errors import DomainError, ParseError

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True, eq=False)
class BlochFunction:
    """An analytic function on the disk or the upper half-plane.

    Parameters
    ----------
    value, deriv : callable
        Vectorised evaluators of ``b`` and ``b'`` on complex arrays.
    domain : {"disk", "half-plane"}
    label : str
        Mini-language spec when the function came from one; used for
        serialisation.
    coefficients : tuple of complex, optional
        Closed-form Taylor coefficients ``q_0, q_1, ...`` of ``b'`` at 0.
    norm_bound : float, optional
        A known upper bound for the Bloch norm.
    """

    value: object
    deriv: object
    domain: str = DISK
    label: str = ""
    coefficients: tuple = None
    norm_bound: float = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        check_domain(self.domain)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.value(z), dtype=complex) * np.ones_like(z)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.deriv(z), dtype=complex) * np.ones_like(z)

    def __add__(self, other):
        if isinstance(other, BlochFunction):
            if other.domain != self.domain:
                raise DomainError("cannot add functions on different domains")
            f, g = self, other
            coeffs = None
            if f.coefficients is not None and g.coefficients is not None:
                m = min(len(f.coefficients), len(g.coefficients))
                coeffs = tuple(a + b for a, b in zip(f.coefficients[:m], g.coefficients[:m]))
            return BlochFunction(
                lambda z: f(z) + g(z),
                lambda z: f.derivative(z) + g.derivative(z),
                self.domain,
                f"({f.label})+({g.label})",
                coeffs,
            )
        c = complex(other)
        f = self
        return BlochFunction(lambda z: f(z) + c, f.derivative, f.domain, f"({f.label})+{c}", f.coefficients, f.norm_bound)

    __radd__ = __add__

    def __mul__(self, c):
        if isinstance(c, BlochFunction):
            return NotImplemented
        c = complex(c)
        f = self
        coeffs = None if f.coefficients is None else tuple(c * q for q in f.coefficients)
        nb = None if f.norm_bound is None else abs(c) * f.norm_bound
        return BlochFunction(lambda z: c * f(z), lambda z: c * f.derivative(z), f.domain, f"{c}*({f.label})", coeffs, nb)

    __rmul__ = __mul__

    def __neg__(self):
        return -1 * self

    def __sub__(self, other):
        return self + (-other if isinstance(other, BlochFunction) else -complex(other))


@dataclass(frozen=True)
class DerivativeSeries:
    """Taylor coefficients ``q_0..q_K`` of ``b'`` at the origin."""

    coefficients: np.ndarray
    order: int
    radius: float = 0.0
    nodes: int = 0

    def __getitem__(self, k):
        return self.coefficients[k]

    def __len__(self):
        return len(self.coefficients)


# -- the zoo --------------------------------------------------------------------


def constant(c, domain=DISK):
    c = complex(c)
    return BlochFunction(lambda z: np.full_like(z, c), lambda z: np.zeros_like(z), domain, f"const:{c}", (0j,), 0.0)


def identity(domain=DISK):
    """``b(z) = z``."""
    return BlochFunction(lambda z: z, lambda z: np.ones_like(z), domain, "poly:0,1" if domain == DISK else "z", (1 + 0j,))


def polynomial(coeffs):
    """``b(z) = c0 + c1 z + ...`` on the disk."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0:
        raise DomainError("polynomial needs at least one coefficient")
    dc = c[1:] * np.arange(1, c.size)
    label = "poly:" + ",".join(_fmt_num(x) for x in c)
    return BlochFunction(
        lambda z: np.polynomial.polynomial.polyval(z, c),
        lambda z: np.polynomial.polynomial.polyval(z, dc) if dc.size else np.zeros_like(z),
        DISK,
        label,
        tuple(dc) if dc.size else (0j,),
    )


def logmap():
    """``b(z) = log(1/(1 - z))`` on the disk."""
    return BlochFunction(
        lambda z: -np.log(1.0 - z),
        lambda z: 1.0 / (1.0 - z),
        DISK,
        "logmap",
        None,
        2.0,
    )


def logz():
    """``b(z) = log z`` on the upper half-plane (Bloch norm 2 there)."""
    return BlochFunction(np.log, lambda z: 1.0 / z, HALF_PLANE, "logz", None, 2.0)


def make_special(a):
    """Extremal function ``(3/4) sqrt(3) S_a(z)^2`` with ``S_a = (z + a)/(1 + a z)``.

    ``q_0`` and ``q_1`` of ``b'`` are attached in closed form.
    """
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise DomainError(f"special-function parameter must lie in [0, 1), got {a}")
    c = 0.75 * SQRT3
    s = 1.0 - a * a

    def value(z):
        return c * ((z + a) / (1.0 + a * z)) ** 2

    def deriv(z):
        return 2.0 * c * (z + a) * s / (1.0 + a * z) ** 3

    q0, q1 = special_coefficients(a)
    return BlochFunction(value, deriv, DISK, f"special:{_fmt_num(a)}", (complex(q0), complex(q1)), 1.0, {"a": a})


def special_coefficients(a):
    """``(q_0, q_1)`` of the special function with parameter ``a``."""
    q0 = 1.5 * SQRT3 * a * (1.0 - a * a)
    q1 = 1.5 * SQRT3 * (1.0 - a * a) * (1.0 - 3.0 * a * a)
    return q0, q1


def lacunary(base=2, K=None):
    """Truncated gap series ``sum_{k=0}^{K} z^(base^k)``.

    ``K`` defaults to the largest value with ``base^K <= 2^40``.
    """
    base = int(base)
    if base < 2:
        raise DomainError(f"lacunary base must be at least 2, got {base}")
    if K is None:
        K = int(math.floor(40 * math.log(2) / math.log(base) + 1e-12))
    K = int(K)
    if K < 1:
        raise DomainError(f"lacunary order must be at least 1, got {K}")
    if base**K > 2**62:
        raise OverflowError(f"{base}^{K} exceeds the supported exponent range")

    def powers(z):
        # p_k = z^(base^k), u_k = z^(base^k - 1), built by repeated powering
        p = z
        u = np.ones_like(z)
        out_p, out_u = [p], [u]
        for _ in range(K):
            u = p ** (base - 1) * u
            p = p**base
            out_p.append(p)
            out_u.append(u)
        return out_p, out_u

    def value(z):
        ps, _ = powers(z)
        return sum(ps)

    def deriv(z):
        _, us = powers(z)
        total = np.zeros_like(z)
        for k, u in enumerate(us):
            total = total + float(base**k) * u
        return total

    coeffs = np.zeros(min(base**K, 4096), dtype=complex)
    for k in range(K + 1):
        if base**k <= coeffs.size:
            coeffs[base**k - 1] = base**k
    return BlochFunction(value, deriv, DISK, f"lacunary:{base}:{K}", tuple(coeffs), None, {"base": base, "K": K})


def conjugate_exponential(b):
    """``w -> b(exp(2 pi i w))`` on the upper half-plane (1-periodic in ``Re w``)."""
    if b.domain != DISK:
        raise DomainError("exponential conjugation takes a disk function")

    def value(w):
        return b(np.exp(2j * np.pi * w))

    def deriv(w):
        xi = np.exp(2j * np.pi * w)
        return 2j * np.pi * xi * b.derivative(xi)

    return BlochFunction(value, deriv, HALF_PLANE, f"exp({b.label})", None, b.norm_bound, {"periodic": True})


def compose_automorphism(b, c, theta=0.0):
    """``b o phi`` for the disk automorphism sending 0 to ``e^{i theta} c``."""
    if b.domain != DISK:
        raise DomainError("disk automorphisms act on disk functions")
    phi, dphi = disk_automorphism(c, theta)
    return BlochFunction(
        lambda z: b(phi(z)),
        lambda z: b.derivative(phi(z)) * dphi(z),
        DISK,
        f"({b.label})o[{_fmt_num(complex(c))},{theta:g}]",
        None,
        b.norm_bound,
    )


def to_disk(b):
    """Transport a half-plane function to the disk through the Cayley map."""
    if b.domain == DISK:
        return b
    return BlochFunction(
        lambda z: b(inverse_cayley(z)),
        lambda z: b.derivative(inverse_cayley(z)) * 2j / (1.0 - z) ** 2,
        DISK,
        f"cayley({b.label})",
        None,
        b.norm_bound,
    )


# -- coefficients -----------------------------------------------------------------


def cauchy_bound(k):
    """Bound ``(k+2)/2 ((k+2)/k)^(k/2)`` on ``|q_k|`` for unit-norm Bloch functions."""
    if int(k) != k or k < 1:
        raise DomainError(f"Cauchy bound is stated for integer k >= 1, got {k}")
    k = int(k)
    return (k + 2) / 2.0 * ((k + 2) / k) ** (k / 2.0)


def derivative_coefficients(b, K, radius=0.5, nodes=None, tol=1e-12, max_doublings=14):
    """Taylor coefficients of ``b'`` from trapezoidal contour integrals.

    ``q_k = (1/N) sum_j b'(r w^j) w^{-jk} / r^k`` with ``w = exp(2 pi i/N)``,
    computed by FFT.  ``N`` starts at ``8K`` and doubles until two successive
    coefficient vectors agree to ``tol`` (relative to the largest |q_k|).
    """
    if b.domain != DISK:
        raise DomainError("Taylor coefficients are taken at the origin of the disk")
    K = int(K)
    if K < 0:
        raise DomainError(f"order must be non-negative, got {K}")
    radius = float(radius)
    if not 0.0 < radius < 1.0:
        raise DomainError(f"contour radius must lie in (0, 1), got {radius}")
    n = int(nodes) if nodes else max(8 * K, 16)
    prev = None
    for _ in range(max_doublings + 1):
        z = radius * np.exp(2j * np.pi * np.arange(n) / n)
        vals = b.derivative(z)
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"b' is not finite on |z| = {radius}")
        q = np.fft.fft(vals)[: K + 1] / n / radius ** np.arange(K + 1)
        if prev is not None:
            scale = max(1.0, float(np.max(np.abs(q))))
            if np.max(np.abs(q - prev)) <= tol * scale:
                return DerivativeSeries(q, K, radius, n)
        prev = q
        n *= 2
    return DerivativeSeries(prev, K, radius, n // 2)


def _hyperbolic_sample(samples, r_max=0.999):
    """Quasi-uniform hyperbolic sample of the disk ``|z| <= r_max``."""
    R = 2.0 * math.atanh(r_max)
    area = 2.0 * math.pi * (math.cosh(R) - 1.0)
    spacing = math.sqrt(area / max(int(samples), 1))
    pts = [0j]
    m = 1
    while m * spacing <= R:
        rho = m * spacing
        count = max(6, int(round(2.0 * math.pi * math.sinh(rho) / spacing)))
        t = math.tanh(rho / 2.0)
        off = 0.5 * (m % 2)
        pts.extend(t * np.exp(2j * np.pi * (np.arange(count) + off) / count))
        m += 1
    return np.asarray(pts, dtype=complex)


def bloch_norm_estimate(b, samples=4000, refine=5):
    """Lower bound for the Bloch norm from sampled quotients.

    The maximum over a quasi-uniform hyperbolic point set is polished by a
    local search started at the best few samples; the returned value is the
    quotient at an actual point, so it never exceeds the true norm.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    pts = _hyperbolic_sample(samples)
    if b.domain == HALF_PLANE:
        pts = inverse_cayley(pts)
    vals = quotient_values(b, pts)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    best = float(np.max(vals))
    if refine and best > 0:
        for idx in np.argsort(vals)[::-1][:refine]:
            z0 = pts[idx]
            d0 = cayley(z0) if b.domain == HALF_PLANE else z0

            def neg(x):
                d = complex(x[0], x[1])
                if abs(d) >= 0.9999:
                    return 0.0
                z = inverse_cayley(d) if b.domain == HALF_PLANE else d
                v = float(quotient_values(b, np.asarray([z]))[0])
                return -v if np.isfinite(v) else 0.0

            res = optimize.minimize(neg, [d0.real, d0.imag], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400})
            best = max(best, -float(res.fun))
    return best


def polynomial_norm_upper(dcoeffs, grid=256):
    """Upper bound for ``sup (1-|z|^2)|p(z)|`` over the disk, ``p`` given by coefficients.

    Grid maximum plus a Lipschitz correction: the gradient of
    ``(1-|z|^2)|p|`` is at most ``2 sum|c_k| + sum k|c_k|`` and every point of
    the closed disk lies within ``1/(2 grid) + pi/(4 grid)`` of the grid.
    """
    c = np.asarray(dcoeffs, dtype=complex)
    k = np.arange(c.size)
    lip = 2.0 * np.sum(np.abs(c)) + np.sum(k * np.abs(c))
    rho = np.linspace(0.0, 1.0, grid + 1)
    theta = 2 * np.pi * np.arange(4 * grid) / (4 * grid)
    z = rho[:, None] * np.exp(1j * theta)[None, :]
    vals = (1.0 - np.abs(z) ** 2) * np.abs(np.polynomial.polynomial.polyval(z, c))
    reach = 1.0 / (2 * grid) + np.pi / (4 * grid)
    return float(np.max(vals) + lip * reach)


# -- mini-language -------------------------------------------------------------------

_NUM = r"[-+0-9.eEj]+"


def parse_function_spec(spec):
    """Build a :class:`BlochFunction` from its mini-language description."""
    if not isinstance(spec, str):
        raise ParseError("function spec must be a string", str(spec), 0)
    text = spec.strip()
    kind, sep, rest = text.partition(":")
    kind = kind.strip().lower()
    offset = len(kind) + len(sep)
    if kind == "logmap" and not sep:
        return logmap()
    if kind == "logz" and not sep:
        return logz()
    if kind in ("logmap", "logz"):
        raise ParseError(f"{kind} takes no parameters", text, offset)
    if kind == "special":
        a = _parse_real(rest, text, offset)
        if not 0.0 <= a < 1.0:
            raise ParseError(f"special parameter must lie in [0, 1), got {a}", text, offset)
        return make_special(a)
    if kind == "lacunary":
        parts = rest.split(":")
        if not 1 <= len(parts) <= 2:
            raise ParseError("expected lacunary:<base>[:<K>]", text, offset)
        base = _parse_int(parts[0], text, offset)
        if base < 2:
            raise ParseError(f"lacunary base must be at least 2, got {base}", text, offset)
        K = None
        if len(parts) == 2:
            K = _parse_int(parts[1], text, offset + len(parts[0]) + 1)
            if K < 1:
                raise ParseError(f"lacunary order must be positive, got {K}", text, offset + len(parts[0]) + 1)
        try:
            return lacunary(base, K)
        except OverflowError as exc:
            raise ParseError(str(exc), text, offset) from None
    if kind == "poly":
        coeffs = []
        pos = offset
        for item in rest.split(","):
            coeffs.append(_parse_complex(item, text, pos))
            pos += len(item) + 1
        return polynomial(coeffs)
    raise ParseError(f"unknown function kind {kind!r}", text, 0)


def _parse_real(s, text, pos):
    s = s.strip()
    try:
        if not re.fullmatch(_NUM, s) or "j" in s:
            raise ValueError
        return float(s)
    except ValueError:
        raise ParseError(f"expected a real number, got {s!r}", text, pos) from None


def _parse_int(s, text, pos):
    s = s.strip()
    if not re.fullmatch(r"[0-9]+", s):
        raise ParseError(f"expected an integer, got {s!r}", text, pos)
    return int(s)


def _parse_complex(s, text, pos):
    s = s.strip()
    try:
        if not s:
            raise ValueError
        return complex(s)
    except ValueError:
        raise ParseError(f"expected a number, got {s!r}", text, pos) from None


def _fmt_num(x):
    x = complex(x)
    if x.imag == 0:
        return repr(x.real) if x.real != int(x.real) else str(int(x.real)) if abs(x.real) < 2**53 else repr(x.real)
    return str(x).strip("()")
