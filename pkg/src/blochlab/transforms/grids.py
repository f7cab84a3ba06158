"""n-adic intervals, boxes and grids in the upper half-plane."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from ..errors import DomainError
from ..quadrature import gl_nodes


@dataclass(frozen=True)
class NAdicBox:
    """``{Re w in [j n^-k, (j+1) n^-k], Im w in [n^-(k+1), n^-k]}``.

    ``reflected=True`` denotes the mirror image in the lower half-plane.
    """

    n: int
    j: int
    k: int
    reflected: bool = False

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"grid base must be an integer >= 2, got {self.n}")

    @property
    def length(self):
        return float(Fraction(1, self.n**self.k)) if self.k >= 0 else float(self.n ** (-self.k))

    @property
    def interval(self):
        L = self.length
        return (self.j * L, (self.j + 1) * L)

    @property
    def heights(self):
        L = self.length
        return (L / self.n, L)

    @property
    def weighted_area(self):
        """``int dx dy / y`` over the box: ``|I| log n``."""
        return self.length * math.log(self.n)

    def reflect(self):
        return NAdicBox(self.n, self.j, self.k, not self.reflected)

    def children(self):
        return [NAdicBox(self.n, self.n * self.j + i, self.k + 1, self.reflected) for i in range(self.n)]

    def contains(self, w):
        """Half-open membership ``[x0, x1) x [y0, y1)`` (vectorised)."""
        w = np.asarray(w, dtype=complex)
        y = -w.imag if self.reflected else w.imag
        x0, x1 = self.interval
        y0, y1 = self.heights
        return (w.real >= x0) & (w.real < x1) & (y >= y0) & (y < y1)

    def triple(self):
        return [self.n, self.j, self.k]

    @classmethod
    def from_triple(cls, t, reflected=False):
        n, j, k = t
        return cls(int(n), int(j), int(k), reflected)


def _level_top(n, k):
    return 1.0 / n**k if k >= 0 else float(n ** (-k))


def _level_tops(n, k):
    # n^-k, computed as 1 / n^k so it matches _level_top exactly
    kf = k.astype(float)
    return np.where(k >= 0, 1.0 / np.power(float(n), np.maximum(kf, 0.0)), np.power(float(n), np.maximum(-kf, 0.0)))


def box_indices(w, n):
    """Indices ``(j, k)`` of the grid box containing ``w`` (``Im w > 0``), vectorised.

    Shared edges go to the box whose half-open interval
    ``[j n^-k, (j+1) n^-k) x [n^-(k+1), n^-k)`` holds the point.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    y = w.imag
    if np.any(y <= 0):
        raise DomainError("grid boxes tile the open upper half-plane")
    k = np.floor(-np.log(y) / math.log(n)).astype(np.int64)
    # exact correction of the floating level guess
    for _ in range(3):
        top = _level_tops(n, k)
        bottom = top / n
        k = np.where(y >= top, k - 1, np.where(y < bottom, k + 1, k))
    scale = np.power(float(n), k.astype(float))
    j = np.floor(w.real * scale).astype(np.int64)
    # settle j against the edges j * L exactly as NAdicBox.contains computes them
    L = _level_tops(n, k)
    for _ in range(2):
        j = np.where(w.real < j * L, j - 1, np.where(w.real >= (j + 1) * L, j + 1, j))
    return j, k


def box_containing(w, n):
    j, k = box_indices(np.asarray([w]), n)
    return NAdicBox(int(n), int(j[0]), int(k[0]))


def _dist_to_vertical(x, y, a, c0, c1):
    """Hyperbolic distance from ``x + iy`` to the segment ``{a + is : c0 <= s <= c1}``."""
    s = np.clip(np.hypot(x - a, y), c0, c1)
    return np.arccosh(1.0 + ((x - a) ** 2 + (y - s) ** 2) / (2.0 * y * s))


def _dist_to_horizontal(x, y, c, a0, a1):
    """Hyperbolic distance from ``x + iy`` to the segment ``{t + ic : a0 <= t <= a1}``."""
    t = np.clip(x, a0, a1)
    return np.arccosh(1.0 + ((x - t) ** 2 + (y - c) ** 2) / (2.0 * y * c))


def boundary_distance_in_grid(w, n):
    """Distance from each ``w`` to the boundary of the grid box holding it (vectorised).

    Points in the lower half-plane are measured in the reflected grid.
    """
    w = np.asarray(w, dtype=complex)
    flat = np.atleast_1d(w).ravel()
    j, k = box_indices(flat.real + 1j * np.abs(flat.imag), n)
    L = _level_tops(n, k)
    x0 = j * L
    x1 = (j + 1) * L
    y0, y1 = L / n, L
    x = flat.real
    y = np.abs(flat.imag)
    d = np.minimum(
        np.minimum(_dist_to_vertical(x, y, x0, y0, y1), _dist_to_vertical(x, y, x1, y0, y1)),
        np.minimum(_dist_to_horizontal(x, y, y0, x0, x1), _dist_to_horizontal(x, y, y1, x0, x1)),
    )
    return d.reshape(w.shape)


def boundary_distance(w, box):
    """Hyperbolic distance from points of the box to its boundary (vectorised).

    Uses the metric ``|dz|/|Im z|``; for reflected boxes the points are
    mirrored first.
    """
    w = np.asarray(w, dtype=complex)
    x = w.real
    y = np.abs(w.imag)
    x0, x1 = box.interval
    y0, y1 = box.heights
    d = np.minimum(
        np.minimum(_dist_to_vertical(x, y, x0, y0, y1), _dist_to_vertical(x, y, x1, y0, y1)),
        np.minimum(_dist_to_horizontal(x, y, y0, x0, x1), _dist_to_horizontal(x, y, y1, x0, x1)),
    )
    return d


def box_area_quadrature(box, nodes=40):
    """``int_box dx dy/y`` by tensor Gauss-Legendre in ``(x, log y)``."""
    x0, x1 = box.interval
    y0, y1 = box.heights
    t, wt = gl_nodes(math.log(y0), math.log(y1), nodes)
    _, wx = gl_nodes(x0, x1, nodes)
    # integrand is 1 in (x, t) coordinates
    return float(np.sum(wx) * np.sum(wt))


def collar_ratio(box, S, epsabs=1e-12):
    """``Area(collar_S) / Area(box)`` for the measure ``dx dy/y``.

    The collar is the set of box points within hyperbolic distance ``S`` of
    the boundary.  Real affine maps are isometries that scale ``dx dy/y``
    uniformly, so the ratio depends only on ``n`` and the unit box
    ``[0,1] x [1/n, 1]`` is used.  For each height the collar cross-section is
    either the full row or two end pieces cut where the distance to the
    nearer vertical side reaches ``S``.
    """
    if S <= 0:
        raise DomainError(f"collar width must be positive, got {S}")
    n = box.n
    logn = math.log(n)
    c0, c1 = 1.0 / n, 1.0

    def row(t):
        y = math.exp(t)
        if min(t + logn, -t) < S:
            return 1.0
        f = lambda x: float(_dist_to_vertical(x, y, 0.0, c0, c1)) - S
        if f(0.5) <= 0:
            return 1.0
        return 2.0 * optimize.brentq(f, 0.0, 0.5, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    lo, hi = -logn, 0.0
    pts = sorted(p for p in (lo + S, hi - S) if lo < p < hi)
    area, _ = integrate.quad(row, lo, hi, points=pts or None, limit=400, epsabs=epsabs, epsrel=1e-12)
    return min(area / logn, 1.0)
