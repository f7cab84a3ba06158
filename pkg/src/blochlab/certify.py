"""Interval-arithmetic certificate for the explicit bound ``Sigma_B^2 < 0.9``.

The bound reduces to finitely many inequalities about the Taylor
coefficients ``q_k`` of ``b'`` for unit-norm Bloch functions ``b``:

* two one-parameter inequalities over the extremal family
  ``b = (3/4) sqrt(3) S_a^2``, checked by interval scans over ``a``;
* a Parseval bound on ``|q_3|^2`` when ``|q_2| >= 2``;
* the tail ``sum_{k >= K} r^(2k+2)/(2k+2) |q_k|^2`` under Cauchy's estimates,
  closed with ``(1 + 2/k)^k <= e^2``.

The two cases ``|q_2| <= 2`` and ``|q_2| >= 2`` give two branch bounds for
``(1 - r^2)/(pi r^2) int_{|z|<r} |b'|^2``; the certificate holds their
maximum below ``0.8998``.  All constants enter as exact rationals.
"""

import heapq
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .core.interval import Interval, get_precision, interval_max, interval_min, isum, working_precision
from .errors import DomainError, InconclusiveError

SCHEMA_VERSION = 1
CLAIM = "Σ²_B < 0.9"
ASSUMPTIONS = ["Bonk reduction principle"]

BRANCH_LIMIT = Fraction(8998, 10000)
TARGET = Fraction(9, 10)
Q3_SQ_CLAIM = Fraction(2216, 100)
Q3_COEFF = Fraction(277, 100)
S2_PARSEVAL = Fraction(58, 100)
MAX_BISECTIONS = 40


def _rational(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # floats are read through their shortest repr, so 0.4 means 2/5
        return Fraction(repr(x))
    return Fraction(x)


def _check_r(r):
    r = _rational(r)
    if not 0 < r < 1:
        raise DomainError(f"radius must lie in (0, 1), got {r}")
    return r


# -- tails ------------------------------------------------------------------------


def tail_term(r, k):
    """Enclosure of ``r^(2k+2)/(2k+2) ((k+2)/2)^2 ((k+2)/k)^k``."""
    x = Interval.enclose(_rational(r)) ** 2
    return x ** (k + 1) / (2 * k + 2) * Interval.enclose(Fraction(k + 2, 2)) ** 2 * Interval.enclose(Fraction(k + 2, k)) ** k


def tail_remainder(r, cutoff):
    """Upper bound for ``sum_{k >= cutoff}`` of the tail terms.

    With ``(1 + 2/k)^k <= e^2`` and ``m = k + 1`` each term is at most
    ``e^2/8 x^m (m + 2 + 1/m)`` where ``x = r^2``; the three geometric-type
    series have closed forms.
    """
    x = Interval.enclose(_rational(r)) ** 2
    M = cutoff + 1
    xM = x**M
    one = Interval.enclose(1)
    q = one - x
    s_m = xM * (M - (M - 1) * x) / q.square()
    s_1 = xM / q
    s_inv = xM / (q * M)
    return Interval.e().square() / 8 * (s_m + 2 * s_1 + s_inv)


def tail_bound(r, K, cutoff=60):
    """Enclosure of ``sum_{k >= K} r^(2k+2)/(2k+2) ((k+2)/2)^2 ((k+2)/k)^k``."""
    r = _rational(r)
    if r >= 1:
        raise DomainError(f"the tail series diverges for r >= 1, got r = {r}")
    r = _check_r(r)
    if K < 3:
        raise DomainError(f"tail starts at K >= 3, got {K}")
    if cutoff < K:
        raise DomainError(f"cutoff {cutoff} must be at least K = {K}")
    partial = isum(tail_term(r, k) for k in range(K, cutoff))
    rem = tail_remainder(r, cutoff)
    zero = Interval.enclose(0)
    return partial + Interval(zero.lo, rem.hi)


# -- coefficient bounds ------------------------------------------------------------


def parseval_q3_bound(s2=S2_PARSEVAL):
    """Enclosure of ``(1/(1 - s^2)^2 - 4 s^4) / s^6`` at ``s^2 = s2``.

    Parseval gives ``|q_3|^2 s^6 <= 1/(1 - s^2)^2 - 4 s^4`` once ``|q_2| >= 2``.
    """
    s2 = _rational(s2)
    if not 0 < s2 < 1:
        raise DomainError(f"need 0 < s^2 < 1, got {s2}")
    s = Interval.enclose(s2)
    one = Interval.enclose(1)
    return (one / (one - s).square() - 4 * s.square()) / s**3


def _abs(x):
    if x.lo >= 0:
        return x
    if x.hi <= 0:
        return -x
    m = max((-x).hi, x.hi)
    zero = x.lo - x.lo
    return Interval(zero, m)


def _clip01(x):
    lo = x.lo if x.lo > 0 else x.lo - x.lo
    return Interval(lo, max(x.hi, lo))


def schwarz_q2_bound(q0_abs):
    """Enclosure of ``2 + 2 sqrt(1 - |q_0|^2)`` (Schwarz lemma bound on ``|q_2|``)."""
    q0 = q0_abs if isinstance(q0_abs, Interval) else Interval.enclose(_rational(q0_abs))
    if q0.lo < 0 or q0.hi > 1:
        raise DomainError(f"|q_0| must lie in [0, 1], got {q0}")
    # 1 - q0^2 is non-negative on [0, 1]; clip the rounding spill below zero
    return 2 + 2 * _clip01(1 - q0.square()).sqrt()


# -- special-family scans -------------------------------------------------------------


def special_q_squares(a):
    """Enclosures of ``q_0^2`` and ``q_1^2`` for parameters in the interval ``a``."""
    u = a.square()
    one = Interval.enclose(1)
    c = Interval.enclose(Fraction(27, 4))
    v = (one - u).square()
    return c * u * v, c * v * (one - 3 * u).square()


def b1_margin(r, a):
    """``r^2/2 - r^2/2 q_0^2 - r^4/4 q_1^2`` over the parameter interval ``a``.

    Evaluated as ``(3u - 1)^2 [r^2/8 (4 - 3u) - 27/16 r^4 (1 - u)^2]``,
    ``u = a^2``, which keeps the double zero at ``a = 1/sqrt(3)`` exact.
    """
    x = Interval.enclose(_rational(r)) ** 2
    u = a.square()
    one = Interval.enclose(1)
    g = x / 8 * (4 - 3 * u) - Interval.enclose(Fraction(27, 16)) * x.square() * (one - u).square()
    return (3 * u - 1).square() * g


def _b4_in_u(x, u):
    one = Interval.enclose(1)
    t = _abs(3 * u - 1)
    w = t * _clip01(4 - 3 * u).sqrt() / 2
    w2 = t.square() * (4 - 3 * u) / 4
    q1s = Interval.enclose(Fraction(27, 4)) * (one - u).square() * (one - 3 * u).square()
    quarter = Interval.enclose(Fraction(1, 4))
    return x / 2 * w2 - x.square() / 4 * q1s + x**3 / 6 * (quarter - 8 * w - 4 * w2)


def _b4_slope(x, u):
    """Enclosure of the ``u``-derivative of the b4 margin; ``3u - 1`` must keep one sign."""
    one = Interval.enclose(1)
    t = one - 3 * u
    v = one - u
    dw2 = Interval.enclose(Fraction(-27, 4)) * t * v
    dq1s = Interval.enclose(-27) * v * t * (2 - 3 * u)
    dw = Interval.enclose(Fraction(-27, 4)) * v / _clip01(4 - 3 * u).sqrt()
    if t.hi < 0:
        dw = -dw
    return (x / 2 - x**3 * 4 / 6) * dw2 - x.square() / 4 * dq1s - x**3 * 8 / 6 * dw


def _b4_natural(r, a):
    return _b4_in_u(Interval.enclose(_rational(r)) ** 2, a.square())


def b4_margin(r, a):
    """``r^2/2 + 17/24 r^6 - [r^2/2 q_0^2 + r^4/4 q_1^2 + r^6/6 (2 + 2w)^2]``, ``w = sqrt(1 - q_0^2)``.

    Uses ``1 - q_0^2 = (3u - 1)^2 (4 - 3u)/4``, so ``w = |3u - 1| sqrt(4 - 3u)/2``
    and the margin becomes ``r^2/2 w^2 - r^4/4 q_1^2 + r^6/6 (1/4 - 8w - 4w^2)``.
    Away from ``u = 1/3`` the natural enclosure is intersected with the
    mean-value form in ``u``, which keeps narrow cells tight.
    """
    x = Interval.enclose(_rational(r)) ** 2
    u = a.square()
    m = _b4_in_u(x, u)
    if (3 * u - 1).contains(0) or u.width == 0:
        return m
    c = Interval.enclose(u.mid)
    centered = _b4_in_u(x, c) + _b4_slope(x, u) * (u - c)
    return Interval(max(m.lo, centered.lo), min(m.hi, centered.hi))


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a certified scan over ``a in [0, 1]``.

    ``margin`` encloses the minimum of the margin over ``[0, 1]`` and is
    refined until its width is at most the requested ``min_width``;
    ``argmin`` is a point where the upper end of ``margin`` is attained.
    ``zero_set`` (non-strict scans only) is an interval outside of which the
    margin is certified positive, or ``None`` when it is positive everywhere.
    """

    margin: Interval
    argmin: Fraction
    cells: int
    deepest: int
    zero_set: tuple = None


def _cell(a0, a1):
    return Interval(Interval.enclose(a0).lo, Interval.enclose(a1).hi)


def _verify_cell(args):
    fn, r, lo, hi, strict, bits = args
    with working_precision(bits):
        stack = [(lo, hi, 0)]
        leaves = []
        deepest = 0
        while stack:
            a0, a1, depth = stack.pop()
            m = fn(r, _cell(a0, a1))
            ok = m.lo > 0 if strict else m.lo >= 0
            if ok:
                leaves.append((a0, a1, m))
                deepest = max(deepest, depth)
                continue
            if m.hi < 0:
                raise InconclusiveError(f"margin negative on a in [{a0}, {a1}]: {m}")
            if depth >= MAX_BISECTIONS:
                raise InconclusiveError(f"margin undecided on a in [{a0}, {a1}] after {depth} bisections: {m}")
            mid = (a0 + a1) / 2
            stack.append((mid, a1, depth + 1))
            stack.append((a0, mid, depth + 1))
        return leaves, deepest


def _point_value(fn, r, a):
    return fn(r, Interval.enclose(a))


def _refine_minimum(fn, r, leaves, min_width, max_steps=20000):
    """Branch and bound: shrink ``[min lo, min point value]`` to ``min_width``."""
    heap = [(m.lo, a0, a1) for a0, a1, m in leaves]
    heapq.heapify(heap)
    # the upper end of any cell enclosure bounds the minimum from above
    a0, a1, m = min(leaves, key=lambda leaf: leaf[2].hi)
    best, arg = m.hi, (a0 + a1) / 2
    for _ in range(max_steps):
        lo, a0, a1 = heap[0]
        if best - lo <= min_width:
            break
        heapq.heappop(heap)
        mid = (a0 + a1) / 2
        for c0, c1 in ((a0, mid), (mid, a1)):
            m = fn(r, _cell(c0, c1))
            v = _point_value(fn, r, (c0 + c1) / 2)
            if v.hi < best:
                best, arg = v.hi, (c0 + c1) / 2
            # a certified lower bound never drops below the parent's
            heapq.heappush(heap, (max(m.lo, lo), c0, c1))
    return Interval(heap[0][0], best), arg


def _zero_hull(fn, r, leaves, width):
    """Hull of the cells where the margin may vanish, bisected down to ``width``."""
    stack = [(a0, a1) for a0, a1, m in leaves if not m.lo > 0]
    hull = None
    while stack:
        a0, a1 = stack.pop()
        if fn(r, _cell(a0, a1)).lo > 0:
            continue
        if a1 - a0 > width:
            mid = (a0 + a1) / 2
            stack.extend([(a0, mid), (mid, a1)])
            continue
        hull = (a0, a1) if hull is None else (min(hull[0], a0), max(hull[1], a1))
    return hull


def _scan(fn, r, grid, strict, threads, min_width=Fraction(1, 10**9), zero_width=Fraction(1, 10**6), coarse=None):
    r = _check_r(r)
    if grid < 2:
        raise DomainError(f"scan grid must have at least 2 cells, got {grid}")
    bits = get_precision()
    # the cheaper ``coarse`` enclosure decides the cells; ``fn`` sharpens the minimum
    jobs = [(coarse or fn, r, Fraction(i, grid), Fraction(i + 1, grid), strict, bits) for i in range(grid)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_verify_cell, jobs))
    else:
        results = [_verify_cell(j) for j in jobs]
    # deterministic fold in cell order
    leaves = [leaf for part, _ in results for leaf in part]
    margin, argmin = _refine_minimum(fn, r, leaves, min_width)
    zero = None if strict else _zero_hull(fn, r, leaves, zero_width)
    return ScanResult(margin, argmin, len(leaves), max(d for _, d in results), zero)


def scan_special(which, r, grid=1000, threads=1):
    """Full :class:`ScanResult` for ``which`` in ``{"b1", "b4"}``."""
    if which == "b1":
        return _scan(b1_margin, r, grid, False, threads)
    if which == "b4":
        return _scan(b4_margin, r, grid, True, threads, coarse=_b4_natural)
    raise DomainError(f"unknown scan {which!r}")


def scan_special_b1(r, grid=1000, threads=1):
    """Certified minimum over ``a in [0, 1]`` of :func:`b1_margin`.

    The margin vanishes at ``a = 1/sqrt(3)``, so cells pass on ``margin >= 0``.
    Raises :class:`InconclusiveError` when some cell cannot be decided.
    """
    return scan_special("b1", r, grid, threads).margin


def scan_special_b4(r, grid=1000, threads=1):
    """Certified minimum over ``a in [0, 1]`` of :func:`b4_margin`; cells must be strictly positive."""
    return scan_special("b4", r, grid, threads).margin


# -- the certificate ----------------------------------------------------------------


def _iv_json(x):
    return None if x is None else x.to_strings()


def _iv_from(x):
    return None if x is None else Interval.from_strings(x)


@dataclass
class Certificate:
    """Every sub-bound behind ``Sigma_B^2 < 0.9`` with its enclosure."""

    r: Fraction
    branch1: Interval = None
    branch2: Interval = None
    tail_K3: Interval = None
    tail_K4: Interval = None
    q3_sq_bound: Interval = None
    scan_b1_margin: Interval = None
    scan_b4_margin: Interval = None
    final_bound: Interval = None
    claim: str = CLAIM
    status: str = "failed"
    failure: str = None
    precision: int = 53
    grid: int = 1000
    cutoff: int = 60
    assumptions: list = field(default_factory=lambda: list(ASSUMPTIONS))
    code_version: str = __version__

    @property
    def verified(self):
        return self.status == "verified"

    def to_dict(self):
        return {
            "version": SCHEMA_VERSION,
            "code_version": self.code_version,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "branch1": _iv_json(self.branch1),
            "branch2": _iv_json(self.branch2),
            "tails": {"K3": _iv_json(self.tail_K3), "K4": _iv_json(self.tail_K4), "cutoff": self.cutoff},
            "q3_sq": _iv_json(self.q3_sq_bound),
            "scans": {"b1_margin": _iv_json(self.scan_b1_margin), "b4_margin": _iv_json(self.scan_b4_margin), "grid": self.grid},
            "final": _iv_json(self.final_bound),
            "claim": self.claim,
            "status": self.status,
            "failure": self.failure,
            "precision": self.precision,
            "assumptions": list(self.assumptions),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported certificate schema version {d.get('version')!r}")
        return cls(
            r=Fraction(d["r"]),
            branch1=_iv_from(d["branch1"]),
            branch2=_iv_from(d["branch2"]),
            tail_K3=_iv_from(d["tails"]["K3"]),
            tail_K4=_iv_from(d["tails"]["K4"]),
            q3_sq_bound=_iv_from(d["q3_sq"]),
            scan_b1_margin=_iv_from(d["scans"]["b1_margin"]),
            scan_b4_margin=_iv_from(d["scans"]["b4_margin"]),
            final_bound=_iv_from(d["final"]),
            claim=d["claim"],
            status=d["status"],
            failure=d["failure"],
            precision=d["precision"],
            grid=d["scans"]["grid"],
            cutoff=d["tails"]["cutoff"],
            assumptions=list(d["assumptions"]),
            code_version=d.get("code_version", __version__),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def branch_bounds(r, cutoff=60):
    """The two case bounds, their tails, and ``2(1 - r^2)/r^2``."""
    r = _check_r(r)
    ri = Interval.enclose(r)
    x = ri.square()
    one = Interval.enclose(1)
    scale = 2 * (one - x) / x
    t3 = tail_bound(r, 3, cutoff)
    t4 = tail_bound(r, 4, cutoff)
    head = x / 2
    b1 = scale * (head + Interval.enclose(Fraction(2, 3)) * x**3 + t3)
    b2 = scale * (head + Interval.enclose(Fraction(17, 24)) * x**3 + Interval.enclose(Q3_COEFF) * x**4 + t4)
    return b1, b2, t3, t4


def certify_sigma(r=Fraction(2, 5), precision=53, grid=1000, threads=1, cutoff=60):
    """Run every sub-check and assemble a :class:`Certificate`.

    Verified means: the ``b1`` scan margin is ``>= 0`` (it has an exact zero),
    the ``b4`` scan margin is ``> 0``, the Parseval bound gives
    ``|q_3|^2 <= 22.16``, and the larger branch bound is at most ``0.8998``,
    hence below ``0.9``.  The first failing component is named in ``failure``.
    """
    r = _check_r(r)
    cert = Certificate(r=r, precision=int(precision), grid=int(grid), cutoff=int(cutoff))
    with working_precision(precision):
        cert.branch1, cert.branch2, cert.tail_K3, cert.tail_K4 = branch_bounds(r, cutoff)
        cert.final_bound = interval_max(cert.branch1, cert.branch2)
        cert.q3_sq_bound = parseval_q3_bound(S2_PARSEVAL)
        failures = []
        try:
            cert.scan_b1_margin = scan_special_b1(r, grid, threads)
        except InconclusiveError:
            failures.append("scan_b1")
        try:
            cert.scan_b4_margin = scan_special_b4(r, grid, threads)
        except InconclusiveError:
            failures.append("scan_b4")
        if cert.q3_sq_bound.hi > Q3_SQ_CLAIM:
            failures.append("q3_sq")
        if cert.branch1.hi > BRANCH_LIMIT:
            failures.append("branch1")
        if cert.branch2.hi > BRANCH_LIMIT:
            failures.append("branch2")
        if not cert.final_bound.hi < TARGET:
            failures.append("final")
    cert.status = "failed" if failures else "verified"
    cert.failure = ",".join(failures) if failures else None
    return cert
