"""Outward-rounded interval arithmetic.

Endpoints are Python floats at the default working precision (53 bits) and
:class:`decimal.Decimal` values when a wider mantissa is requested through
:func:`working_precision`.  Every operation returns an interval that contains
the exact result for all real inputs drawn from the operand intervals.

Float mode rounds outward with :func:`math.nextafter`, skipping the widening
whenever an error-free transformation shows the floating result is exact, so
``0 * x`` and ``1 + 1`` stay thin.  Decimal mode uses floor/ceiling contexts
for the field operations; ``sqrt``, ``exp`` and ``ln`` are correctly rounded
to nearest by :mod:`decimal`, so one step outward encloses the true value.
"""

import contextlib
import contextvars
import decimal
import math
from decimal import Decimal
from fractions import Fraction

from ..errors import DomainError

__all__ = [
    "Interval",
    "get_precision",
    "set_precision",
    "working_precision",
    "interval_max",
    "interval_min",
    "isum",
]

NATIVE_PRECISION = 53

_precision = contextvars.ContextVar("blochlab_precision", default=NATIVE_PRECISION)
_contexts = {}

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
_SPLIT_LIMIT = 1e290


def get_precision():
    """Working precision in bits; 53 means native doubles."""
    return _precision.get()


def set_precision(bits):
    bits = int(bits)
    if bits < NATIVE_PRECISION:
        raise DomainError(f"precision must be at least {NATIVE_PRECISION} bits, got {bits}")
    _precision.set(bits)


@contextlib.contextmanager
def working_precision(bits):
    """Temporarily switch the working precision (in bits)."""
    bits = int(bits)
    if bits < NATIVE_PRECISION:
        raise DomainError(f"precision must be at least {NATIVE_PRECISION} bits, got {bits}")
    token = _precision.set(bits)
    try:
        yield bits
    finally:
        _precision.reset(token)


def _digits(bits):
    return int(math.ceil(bits * math.log10(2.0))) + 1


def _decimal_contexts(bits):
    ctxs = _contexts.get(bits)
    if ctxs is None:
        prec = _digits(bits)
        kw = dict(prec=prec, Emax=999999, Emin=-999999, traps=[decimal.InvalidOperation, decimal.DivisionByZero])
        ctxs = (
            decimal.Context(rounding=decimal.ROUND_FLOOR, **kw),
            decimal.Context(rounding=decimal.ROUND_CEILING, **kw),
            decimal.Context(rounding=decimal.ROUND_HALF_EVEN, **kw),
        )
        _contexts[bits] = ctxs
    return ctxs


# ---------------------------------------------------------------------------
# float helpers


def _neg(x):
    # Decimal unary minus rounds to the ambient context; copy_negate is exact
    return x.copy_negate() if isinstance(x, Decimal) else -x


def _down(x):
    return math.nextafter(x, -_INF)


def _up(x):
    return math.nextafter(x, _INF)


def _two_sum_err(a, b, s):
    # exact a + b - s (Knuth)
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod_err(a, b, p):
    # exact a * b - p (Dekker); caller guards against overflow
    ah, al = _split(a)
    bh, bl = _split(b)
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _add_f(a, b):
    s = a + b
    if math.isinf(s) or math.isnan(s):
        return s, s
    e = _two_sum_err(a, b, s)
    if e == 0:
        return s, s
    return (s, _up(s)) if e > 0 else (_down(s), s)


def _mul_f(a, b):
    if a == 0.0 or b == 0.0:
        return 0.0, 0.0
    p = a * b
    if math.isinf(p) or abs(a) > _SPLIT_LIMIT or abs(b) > _SPLIT_LIMIT or abs(p) < 1e-280:
        return _down(p), _up(p)
    e = _two_prod_err(a, b, p)
    if e == 0:
        return p, p
    return (p, _up(p)) if e > 0 else (_down(p), p)


def _div_f(a, b):
    if a == 0.0:
        return 0.0, 0.0
    q = a / b
    if math.isinf(q) or abs(q) < 1e-280 or abs(q) > _SPLIT_LIMIT or abs(b) > _SPLIT_LIMIT:
        return _down(q), _up(q)
    # a - q*b exactly, sign tells which side of q the true quotient lies
    p = q * b
    r = (a - p) - _two_prod_err(q, b, p)
    if r == 0:
        return q, q
    if (r > 0) == (b > 0):
        return q, _up(q)
    return _down(q), q


def _float_enclose(q):
    """Tightest float interval around an exact rational ``q``."""
    q = Fraction(q)
    f = float(q)
    fq = Fraction(f)
    if fq == q:
        return f, f
    if fq < q:
        return f, _up(f)
    return _down(f), f


def _to_decimal_bounds(x, bits):
    """Directed Decimal bounds for an exact number (int, float, Fraction, Decimal)."""
    lo_ctx, hi_ctx, _ = _decimal_contexts(bits)
    if isinstance(x, Decimal):
        return lo_ctx.plus(x), hi_ctx.plus(x)
    if isinstance(x, float):
        d = Decimal(x)
        return lo_ctx.plus(d), hi_ctx.plus(d)
    q = Fraction(x)
    n, d = Decimal(q.numerator), Decimal(q.denominator)
    return lo_ctx.divide(n, d), hi_ctx.divide(n, d)


def _exact(x):
    """Convert an endpoint or scalar to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class Interval:
    """Closed real interval ``[lo, hi]`` with outward-rounded arithmetic."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if isinstance(lo, (int, Fraction)) and not isinstance(lo, bool):
            lo = _float_enclose(lo)[0] if get_precision() == NATIVE_PRECISION else _to_decimal_bounds(lo, get_precision())[0]
        if isinstance(hi, (int, Fraction)) and not isinstance(hi, bool):
            hi = _float_enclose(hi)[1] if get_precision() == NATIVE_PRECISION else _to_decimal_bounds(hi, get_precision())[1]
        if isinstance(lo, float) and math.isnan(lo) or isinstance(hi, float) and math.isnan(hi):
            raise DomainError("interval endpoint is NaN")
        if isinstance(lo, Decimal) and lo.is_nan() or isinstance(hi, Decimal) and hi.is_nan():
            raise DomainError("interval endpoint is NaN")
        if lo > hi:
            raise DomainError(f"invalid interval: lo={lo!r} > hi={hi!r}")
        self.lo = lo
        self.hi = hi

    # -- construction -----------------------------------------------------

    @classmethod
    def enclose(cls, x):
        """Tightest enclosure of an exact number at the working precision.

        Strings are parsed as exact decimals or ``p/q`` rationals.
        """
        if isinstance(x, Interval):
            return x
        if isinstance(x, str):
            x = Fraction(x.strip())
        bits = get_precision()
        if bits == NATIVE_PRECISION and not isinstance(x, Decimal):
            if isinstance(x, float):
                if math.isnan(x):
                    raise DomainError("cannot enclose NaN")
                return cls(x, x)
            return cls(*_float_enclose(x))
        return cls(*_to_decimal_bounds(x, bits))

    @classmethod
    def pi(cls):
        return cls._constant("pi")

    @classmethod
    def e(cls):
        return cls._constant("e")

    @classmethod
    def _constant(cls, name):
        import mpmath

        bits = get_precision()
        dps = _digits(bits) + 20
        with mpmath.workdps(dps):
            text = mpmath.nstr(getattr(mpmath.mp, name), dps, strip_zeros=False)
        q = Fraction(text)
        slack = Fraction(1, 10 ** (dps - 5))
        if bits == NATIVE_PRECISION:
            return cls(_float_enclose(q - slack)[0], _float_enclose(q + slack)[1])
        return cls(_to_decimal_bounds(q - slack, bits)[0], _to_decimal_bounds(q + slack, bits)[1])

    # -- inspection -------------------------------------------------------

    @property
    def is_decimal(self):
        return isinstance(self.lo, Decimal) or isinstance(self.hi, Decimal)

    @property
    def width(self):
        return float(_exact(self.hi) - _exact(self.lo)) if self.is_decimal else self.hi - self.lo

    @property
    def mid(self):
        return float((_exact(self.lo) + _exact(self.hi)) / 2)

    def contains(self, x):
        """Exact membership test for a number or a sub-interval."""
        if isinstance(x, Interval):
            return self.contains(x.lo) and self.contains(x.hi)
        if isinstance(x, str):
            x = Fraction(x)
        x = _exact(x)
        return _exact(self.lo) <= x <= _exact(self.hi)

    __contains__ = contains

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return _exact(self.lo) == _exact(other.lo) and _exact(self.hi) == _exact(other.hi)

    def __hash__(self):
        return hash((_exact(self.lo), _exact(self.hi)))

    def to_strings(self):
        """Lossless text form ``[lo, hi]``: shortest round-trip repr for floats."""
        return [_fmt(self.lo), _fmt(self.hi)]

    @classmethod
    def from_strings(cls, pair):
        lo, hi = pair
        return cls(_parse_endpoint(lo), _parse_endpoint(hi))

    # -- arithmetic -------------------------------------------------------

    def _mode(self, other):
        bits = get_precision()
        if bits > NATIVE_PRECISION:
            return bits
        if self.is_decimal or (isinstance(other, Interval) and other.is_decimal):
            return _DEFAULT_DECIMAL_BITS
        return NATIVE_PRECISION

    def _coerce(self, other):
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, float, Fraction, Decimal)) and not isinstance(other, bool):
            bits = self._mode(None)
            if bits == NATIVE_PRECISION:
                if isinstance(other, Decimal):
                    return Interval(*_float_enclose(Fraction(other)))
                return Interval.enclose(other)
            return Interval(*_to_decimal_bounds(other, bits))
        return NotImplemented

    def __neg__(self):
        return Interval(_neg(self.hi), _neg(self.lo))

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        bits = self._mode(other)
        if bits == NATIVE_PRECISION:
            return Interval(_add_f(self.lo, other.lo)[0], _add_f(self.hi, other.hi)[1])
        lo_ctx, hi_ctx, _ = _decimal_contexts(bits)
        return Interval(lo_ctx.add(_dec(self.lo), _dec(other.lo)), hi_ctx.add(_dec(self.hi), _dec(other.hi)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        bits = self._mode(other)
        pairs = ((self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi))
        if bits == NATIVE_PRECISION:
            prods = [_mul_f(a, b) for a, b in pairs]
            return Interval(min(p[0] for p in prods), max(p[1] for p in prods))
        lo_ctx, hi_ctx, _ = _decimal_contexts(bits)
        los = [lo_ctx.multiply(_dec(a), _dec(b)) for a, b in pairs]
        his = [hi_ctx.multiply(_dec(a), _dec(b)) for a, b in pairs]
        return Interval(min(los), max(his))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.lo <= 0 <= other.hi:
            raise DomainError(f"division by an interval containing 0: {other}")
        bits = self._mode(other)
        pairs = ((self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi))
        if bits == NATIVE_PRECISION:
            quots = [_div_f(a, b) for a, b in pairs]
            return Interval(min(q[0] for q in quots), max(q[1] for q in quots))
        lo_ctx, hi_ctx, _ = _decimal_contexts(bits)
        los = [lo_ctx.divide(_dec(a), _dec(b)) for a, b in pairs]
        his = [hi_ctx.divide(_dec(a), _dec(b)) for a, b in pairs]
        return Interval(min(los), max(his))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def square(self):
        """``x**2``, tight when the interval straddles zero."""
        if self.lo >= 0:
            return self * self
        if self.hi <= 0:
            return (-self) * (-self)
        m = max(_neg(self.lo), self.hi)
        sq = Interval(m, m) * Interval(m, m)
        zero = Decimal(0) if sq.is_decimal else 0.0
        return Interval(zero, sq.hi)

    def __pow__(self, n):
        if not isinstance(n, int) or isinstance(n, bool):
            raise DomainError("interval powers are restricted to integer exponents")
        if n < 0:
            return 1 / (self ** (-n))
        if n == 0:
            return self._coerce(1)
        if n % 2 == 0:
            return self.square() ** (n // 2)
        if self.lo >= 0:
            return _pos_pow(self, n)
        if self.hi <= 0:
            return -_pos_pow(-self, n)
        lo_part = -_pos_pow(self._coerce(_neg(self.lo)), n)
        hi_part = _pos_pow(self._coerce(self.hi), n)
        return Interval(lo_part.lo, hi_part.hi)

    def sqrt(self):
        if self.lo < 0:
            raise DomainError(f"sqrt of an interval with negative values: {self}")
        bits = self._mode(None)
        if bits == NATIVE_PRECISION:
            return Interval(_sqrt_f(self.lo)[0], _sqrt_f(self.hi)[1])
        _, _, near = _decimal_contexts(bits)
        lo = near.sqrt(_dec(self.lo))
        hi = near.sqrt(_dec(self.hi))
        return Interval(max(near.next_minus(lo), Decimal(0)) if lo != 0 else lo, hi if hi == 0 else near.next_plus(hi))

    def exp(self):
        bits = self._mode(None)
        if bits == NATIVE_PRECISION:
            lo = 1.0 if self.lo == 0 else max(_down(_down(math.exp(self.lo))), 0.0)
            try:
                hi = 1.0 if self.hi == 0 else _up(_up(math.exp(self.hi)))
            except OverflowError:
                hi = _INF
            return Interval(lo, hi)
        _, _, near = _decimal_contexts(bits)
        lo = near.exp(_dec(self.lo))
        hi = near.exp(_dec(self.hi))
        return Interval(lo if self.lo == 0 else near.next_minus(lo), hi if self.hi == 0 else near.next_plus(hi))

    def log(self):
        if self.lo <= 0:
            raise DomainError(f"log of a non-positive interval: {self}")
        bits = self._mode(None)
        if bits == NATIVE_PRECISION:
            lo = 0.0 if self.lo == 1 else _down(_down(math.log(self.lo)))
            hi = 0.0 if self.hi == 1 else _up(_up(math.log(self.hi)))
            return Interval(lo, hi)
        _, _, near = _decimal_contexts(bits)
        lo = near.ln(_dec(self.lo))
        hi = near.ln(_dec(self.hi))
        return Interval(lo if self.lo == 1 else near.next_minus(lo), hi if self.hi == 1 else near.next_plus(hi))

    def split(self, parts=2):
        """Cut into ``parts`` adjacent sub-intervals covering ``self`` exactly."""
        lo, hi = _exact(self.lo), _exact(self.hi)
        cuts = [lo + (hi - lo) * i / parts for i in range(parts + 1)]
        out = []
        for a, b in zip(cuts, cuts[1:]):
            out.append(Interval(Interval.enclose(a).lo, Interval.enclose(b).hi))
        return out


# Decimal operands met at native working precision are combined at this width.
_DEFAULT_DECIMAL_BITS = 200


def _dec(x):
    return x if isinstance(x, Decimal) else Decimal(x)


def _pos_pow(x, n):
    result = None
    base = x
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _sqrt_f(x):
    if x == 0 or x == _INF:
        return x, x
    s = math.sqrt(x)
    lo, hi = _mul_f(s, s)
    if lo == hi == x:
        return s, s
    return max(_down(s), 0.0), _up(s)


_FLOAT_DIGITS = 17


def _fmt(x):
    """Floats as their shortest repr; Decimals padded past 17 significant digits.

    A float repr never carries more than 17 significant digits, so the
    padding tells the two kinds apart when the text is read back.
    """
    if isinstance(x, float):
        return repr(x)
    if not x.is_finite() or x == 0:
        return str(x)
    t = x.as_tuple()
    short = _FLOAT_DIGITS + 1 - len(t.digits)
    if short > 0:
        x = Decimal((t.sign, t.digits + (0,) * short, t.exponent - short))
    return str(x)


def _parse_endpoint(text):
    text = str(text)
    if text in ("inf", "-inf"):
        return float(text)
    d = Decimal(text)
    if len(d.as_tuple().digits) > _FLOAT_DIGITS:
        return d
    f = float(text)
    return f if repr(f) == text else d


def interval_max(*xs):
    """Enclosure of the pointwise maximum."""
    return Interval(max(x.lo for x in xs), max(x.hi for x in xs))


def interval_min(*xs):
    return Interval(min(x.lo for x in xs), min(x.hi for x in xs))


def isum(items):
    """Left-to-right interval sum; the fixed order keeps results bit-reproducible."""
    total = None
    for x in items:
        total = x if total is None else total + x
    if total is None:
        return Interval.enclose(0)
    return total
