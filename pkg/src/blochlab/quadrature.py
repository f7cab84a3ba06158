"""Quadrature building blocks shared by the estimators.

All reductions go through ``numpy.sum`` on arrays laid out in a fixed order,
so results do not depend on how work is scheduled.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

# Odd prime base for trapezoidal node counts.  The multiplicative order of 2
# modulo 83 is 82, so frequency gaps 2^k - 2^j (k - j <= 40) never alias onto
# multiples of 83 * 2^m.
TRAPEZOID_BASE = 83


@functools.lru_cache(maxsize=64)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_nodes(a, b, n):
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def circle_trapezoid(g, r, tol=1e-10, n0=TRAPEZOID_BASE * 16, max_nodes=TRAPEZOID_BASE * 2**19, chunk=2**20, log_space=False):
    """Mean of ``g`` over the circle ``|z| = r`` by the trapezoidal rule.

    The node count doubles, reusing previous samples, until two successive
    means agree to ``tol`` (relative, or absolute on the log-mean when
    ``log_space`` is set).  With ``log_space`` the integrand ``g`` must
    return ``log |f|`` and the result is ``log mean |f|``.

    Returns ``(value, nodes, converged)``.
    """
    def partial(n, offset):
        # sum of g at nodes exp(2 pi i (j + offset)/n), j = 0..n-1
        acc = []
        for start in range(0, n, chunk):
            j = np.arange(start, min(n, start + chunk))
            z = r * np.exp(2j * np.pi * (j + offset) / n)
            v = np.asarray(g(z))
            if log_space:
                m = float(np.max(v))
                acc.append((m, float(np.sum(np.exp(v - m)))))
            else:
                acc.append(np.sum(v))
        if log_space:
            m = max(a for a, _ in acc)
            return m + math.log(sum(s * math.exp(a - m) for a, s in acc))
        return np.sum(np.asarray(acc))

    n = int(n0)
    total = partial(n, 0.0)  # sum (or log-sum) over n nodes
    prev = total - math.log(n) if log_space else total / n
    while n < max_nodes:
        mids = partial(n, 0.5)
        if log_space:
            m = max(total, mids)
            total = m + math.log(math.exp(total - m) + math.exp(mids - m))
        else:
            total = total + mids
        n *= 2
        cur = total - math.log(n) if log_space else total / n
        if log_space:
            ok = abs(cur - prev) <= tol
        else:
            ok = abs(cur - prev) <= tol * max(abs(cur), 1e-300)
        if ok:
            return cur, n, True
        prev = cur
    return prev, n, False


@dataclass
class CubatureResult:
    value: complex
    error: float
    converged: bool
    cells: int


def adaptive_cubature(f, x_range, y_range, tol=1e-6, order=6, max_cells=200000, rtol=0.0, x_breaks=None, y_breaks=None):
    """Adaptive tensor Gauss-Legendre cubature of ``f(x, y)`` over a rectangle.

    Each cell carries a coarse estimate (one ``order x order`` rule) and a fine
    one (the same rule on its four quadrants); their difference is the cell's
    error estimate.  Cells with the largest errors are split until the summed
    error drops below ``max(tol, rtol*|value|)``.  ``f`` receives flat arrays.
    Optional interior breakpoints seed the initial tensor grid of cells.
    """
    xg, wg = gauss_legendre(order)
    ref_x = 0.5 * (xg + 1.0)
    ref_w = 0.5 * wg
    RX, RY = np.meshgrid(ref_x, ref_x, indexing="ij")
    RW = np.outer(ref_w, ref_w).ravel()
    RX, RY = RX.ravel(), RY.ravel()

    def rule(x0, x1, y0, y1):
        dx = (x1 - x0)[:, None]
        dy = (y1 - y0)[:, None]
        X = x0[:, None] + dx * RX[None, :]
        Y = y0[:, None] + dy * RY[None, :]
        vals = np.asarray(f(X.ravel(), Y.ravel())).reshape(X.shape)
        return (vals * RW[None, :]).sum(axis=1) * (dx * dy)[:, 0]

    def quadrants(x0, x1, y0, y1):
        xm = 0.5 * (x0 + x1)
        ym = 0.5 * (y0 + y1)
        cx0 = np.concatenate([x0, xm, x0, xm])
        cx1 = np.concatenate([xm, x1, xm, x1])
        cy0 = np.concatenate([y0, y0, ym, ym])
        cy1 = np.concatenate([ym, ym, y1, y1])
        return cx0, cx1, cy0, cy1

    def fine(x0, x1, y0, y1):
        k = x0.size
        cx0, cx1, cy0, cy1 = quadrants(x0, x1, y0, y1)
        parts = rule(cx0, cx1, cy0, cy1)
        return parts.reshape(4, k).sum(axis=0), parts

    def edges(rng, breaks):
        lo, hi = float(rng[0]), float(rng[1])
        inner = [float(b) for b in (breaks if breaks is not None else ()) if lo < b < hi]
        return np.array([lo] + sorted(set(inner)) + [hi])

    ex = edges(x_range, x_breaks)
    ey = edges(y_range, y_breaks)
    X0, Y0 = np.meshgrid(ex[:-1], ey[:-1], indexing="ij")
    X1, Y1 = np.meshgrid(ex[1:], ey[1:], indexing="ij")
    x0, x1, y0, y1 = X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel()
    coarse = rule(x0, x1, y0, y1)
    fine_v, _ = fine(x0, x1, y0, y1)
    err = np.abs(fine_v - coarse)
    while True:
        value = np.sum(fine_v)
        total_err = float(np.sum(err))
        target = max(tol, rtol * abs(value))
        if total_err <= target:
            return CubatureResult(complex(value), total_err, True, x0.size)
        if x0.size >= max_cells:
            return CubatureResult(complex(value), total_err, False, x0.size)
        order_idx = np.argsort(-err, kind="stable")
        csum = np.cumsum(err[order_idx])
        # split the fewest worst cells carrying half the excess error
        need = 0.5 * (total_err - target)
        count = int(np.searchsorted(csum, need) + 1)
        count = max(1, min(count, order_idx.size, (max_cells - x0.size) // 3 + 1))
        pick = np.sort(order_idx[:count])
        keep = np.ones(x0.size, dtype=bool)
        keep[pick] = False
        px0, px1, py0, py1 = x0[pick], x1[pick], y0[pick], y1[pick]
        cx0, cx1, cy0, cy1 = quadrants(px0, px1, py0, py1)
        _, child_coarse = fine(px0, px1, py0, py1)
        child_fine, _ = fine(cx0, cx1, cy0, cy1)
        x0 = np.concatenate([x0[keep], cx0])
        x1 = np.concatenate([x1[keep], cx1])
        y0 = np.concatenate([y0[keep], cy0])
        y1 = np.concatenate([y1[keep], cy1])
        fine_v = np.concatenate([fine_v[keep], child_fine])
        err = np.concatenate([err[keep], np.abs(child_fine - child_coarse)])


def adaptive_gl_1d(F, a, b, tol=1e-10, order=20, panels=1, max_panels=4096):
    """Adaptive composite Gauss-Legendre for a vectorised ``F`` on ``[a, b]``.

    A panel is accepted when its rule agrees with the sum over its halves.
    Returns ``(value, error, converged)``.
    """
    edges = np.linspace(a, b, panels + 1)
    todo = list(zip(edges[:-1], edges[1:]))
    accepted = []
    err_total = 0.0
    converged = True

    def panel_rule(lo, hi):
        x, w = gl_nodes(lo, hi, order)
        return np.sum(np.asarray(F(x)) * w)

    cache = {}
    while todo:
        if len(accepted) + len(todo) > max_panels:
            converged = False
            for lo, hi in todo:
                accepted.append((lo, panel_rule(lo, hi)))
            break
        lo, hi = todo.pop()
        whole = cache.pop((lo, hi), None)
        if whole is None:
            whole = panel_rule(lo, hi)
        mid = 0.5 * (lo + hi)
        left = panel_rule(lo, mid)
        right = panel_rule(mid, hi)
        diff = abs(left + right - whole)
        width_share = (hi - lo) / (b - a)
        if diff <= max(tol * width_share, 1e-15 * abs(left + right)):
            accepted.append((lo, left + right))
            err_total += diff
        else:
            cache[(lo, mid)] = left
            cache[(mid, hi)] = right
            todo.append((mid, hi))
            todo.append((lo, mid))
    accepted.sort(key=lambda t: t[0])
    return np.sum(np.asarray([v for _, v in accepted])), err_total, converged
