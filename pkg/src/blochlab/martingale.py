"""The n-adic martingale of interval averages of a Bloch function.

For an n-adic interval ``I`` the value ``B_I`` is the mean of ``b`` over the
horizontal segment ``I + i h0``.  All intervals share one height, so each
parent is exactly the mean of its children and the average identity holds up
to quadrature error only.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core.hyperbolic import HALF_PLANE
from .errors import DomainError
from .quadrature import adaptive_gl_1d, gauss_legendre
from .transforms.grids import NAdicBox
from .transforms.operators import box_average


@dataclass
class MartingaleTree:
    """Values ``B_I`` indexed by ``(level, j)`` with per-node error estimates.

    ``errors[(level, j)]`` is the larger of the quadrature error and the
    height-halving discrepancy ``|B_I(h0) - B_I(h0/2)|``; ``flagged`` lists the
    nodes whose discrepancy exceeded the requested tolerance.
    """

    n: int
    depth: int
    h0: float
    values: dict
    errors: dict = field(default_factory=dict)
    flagged: list = field(default_factory=list)

    def __getitem__(self, index):
        return self.values[tuple(index)]

    def level_values(self, level):
        return np.array([self.values[(level, j)] for j in range(self.n**level)])

    def to_json(self):
        nodes = [
            [lvl, j, v.real, v.imag, self.errors.get((lvl, j), 0.0)]
            for (lvl, j), v in sorted(self.values.items())
        ]
        return json.dumps({"n": self.n, "depth": self.depth, "h0": self.h0, "nodes": nodes})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        values, errors = {}, {}
        for lvl, j, re, im, tol in d["nodes"]:
            values[(lvl, j)] = complex(re, im)
            errors[(lvl, j)] = tol
        return cls(d["n"], d["depth"], d["h0"], values, errors)


def segment_means(b, x0, width, count, h, tol=1e-12, order=24):
    """Means of ``b(x + ih)`` over ``count`` consecutive segments of ``width`` from ``x0``.

    All segments get a fixed Gauss-Legendre rule first; those where doubling
    the order changes the mean by more than ``tol`` fall back to adaptive
    bisection.  Returns ``(means, errors)``.
    """
    def fixed(m):
        x, w = gauss_legendre(m)
        a = x0 + width * np.arange(count)
        X = a[:, None] + 0.5 * width * (x[None, :] + 1.0)
        return (b(X + 1j * h) * w[None, :]).sum(axis=1) * 0.5

    lo = fixed(order)
    hi = fixed(2 * order)
    err = np.abs(hi - lo)
    bad = np.nonzero(err > tol)[0]
    for j in bad:
        a = x0 + j * width
        val, e, _ = adaptive_gl_1d(lambda x: b(x + 1j * h), a, a + width, tol=tol * width, order=order)
        hi[j] = val / width
        err[j] = e / width
    return hi, err


def _check(b, n, depth, h0):
    if b.domain != HALF_PLANE:
        raise DomainError("the martingale is built from functions on the half-plane")
    if int(n) != n or n < 2:
        raise DomainError(f"grid base must be an integer >= 2, got {n}")
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if not 0 < h0 < float(n) ** -depth:
        raise DomainError(f"need 0 < h0 < n^-depth, got h0={h0}")


def _tree_values(b, n, depth, h, root, tol):
    level0, j0 = root
    width = float(n) ** -(level0 + depth)
    count = n**depth
    leaves, qerr = segment_means(b, j0 * n**depth * width, width, count, h, tol=tol)
    levels = [leaves]
    errs = [qerr]
    for _ in range(depth):
        levels.append(levels[-1].reshape(-1, n).mean(axis=1))
        errs.append(errs[-1].reshape(-1, n).mean(axis=1))
    return levels[::-1], errs[::-1]


def build_martingale(b, n, depth, h0, tol=1e-6, quad_tol=1e-12):
    """Tree of ``B_I`` for the n-adic subintervals of ``[0, 1]`` down to ``depth``.

    Values use the common height ``h0``; a second pass at ``h0/2`` supplies
    the per-node consistency check.
    """
    _check(b, n, depth, h0)
    vals, qerr = _tree_values(b, n, depth, h0, (0, 0), quad_tol)
    half, _ = _tree_values(b, n, depth, h0 / 2, (0, 0), quad_tol)
    values, errors, flagged = {}, {}, []
    for lvl in range(depth + 1):
        diff = np.abs(vals[lvl] - half[lvl])
        for j in range(n**lvl):
            values[(lvl, j)] = complex(vals[lvl][j])
            errors[(lvl, j)] = float(max(diff[j], qerr[lvl][j]))
            if diff[j] > tol:
                flagged.append((lvl, j))
    return MartingaleTree(int(n), int(depth), float(h0), values, errors, flagged)


def _variance(parent, children):
    return float(np.mean(np.abs(children - parent) ** 2))


def local_variance(tree, index):
    """``(1/n) sum_j |B_{I_j} - B_I|^2`` over the children of ``I = (level, j)``."""
    lvl, j = index
    if lvl >= tree.depth:
        raise DomainError(f"interval {index} is a leaf of a depth-{tree.depth} tree")
    if not 0 <= j < tree.n**lvl:
        raise DomainError(f"no interval {index} in the tree")
    kids = np.array([tree.values[(lvl + 1, tree.n * j + i)] for i in range(tree.n)])
    return _variance(tree.values[(lvl, j)], kids)


def variance_extremes(tree, level):
    """``(min, max)`` of ``var_I B / log n`` over intervals at ``level``."""
    if not 0 <= level < tree.depth:
        raise DomainError(f"level must lie in [0, {tree.depth}), got {level}")
    v = [local_variance(tree, (level, j)) / math.log(tree.n) for j in range(tree.n**level)]
    return min(v), max(v)


def compare_box_variance(b, n, index=(0, 0), h0=None, tol=1e-8):
    """``|var_I B / log n - box average of |2 y b'|^2 over the box of I|``.

    Only the children of ``I`` are needed; ``h0`` defaults to ``1e-9 |I|``.
    """
    lvl, j = index
    width = float(n) ** -lvl
    if h0 is None:
        h0 = 1e-9 * width
    _check(b, n, lvl + 1, h0)
    kids, _ = segment_means(b, j * width, width / n, n, h0)
    var = _variance(kids.mean(), kids)
    box = box_average(b, NAdicBox(int(n), int(j), int(lvl)), tol=tol)
    return abs(var / math.log(n) - box)
