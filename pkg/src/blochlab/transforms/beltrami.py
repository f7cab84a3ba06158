"""Beltrami coefficients: construction, periodisation, damping, JSON form."""

import json
from dataclasses import dataclass, field

import numpy as np

from ..blochlib import conjugate_exponential, parse_function_spec
from ..core.hyperbolic import DISK, distance
from ..errors import DomainError
from .grids import NAdicBox, boundary_distance_in_grid, box_indices

SUPPORTS = ("disk", "lower", "boxes", "periodic")


@dataclass(frozen=True, eq=False)
class BeltramiCoefficient:
    """Bounded measurable field ``mu``, zero outside its support.

    ``params`` holds the JSON description (``kind`` plus parameters) when the
    coefficient was built by one of the constructors in this module.
    """

    evaluator: object
    support: str
    bound: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.support not in SUPPORTS:
            raise DomainError(f"unknown support {self.support!r}")

    @property
    def kind(self):
        return self.params.get("kind", "custom")

    def in_support(self, w):
        w = np.asarray(w, dtype=complex)
        if self.support == "disk":
            return np.abs(w) < 1
        if self.support in ("lower", "periodic"):
            return w.imag < 0
        boxes = [NAdicBox.from_triple(t, reflected=True) for t in self.params["boxes"]]
        mask = np.zeros(w.shape, dtype=bool)
        for bx in boxes:
            mask |= bx.contains(w)
        return mask

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        mask = self.in_support(w)
        out = np.zeros(w.shape, dtype=complex)
        if np.any(mask):
            out[mask] = np.asarray(self.evaluator(w[mask]), dtype=complex) * np.ones(int(mask.sum()))
        return out

    def __sub__(self, other):
        f, g = self, other
        support = f.support if f.support == g.support else ("disk" if f.support == "disk" else "lower")
        return BeltramiCoefficient(lambda w: f(w) - g(w), support, f.bound + g.bound, {"kind": "difference"})

    def to_json(self):
        if self.kind in ("custom", "difference"):
            raise ValueError("only coefficients built by the module constructors serialise")
        return json.dumps(self.params, sort_keys=True)


def constant_coefficient(c, support="lower"):
    """``mu = c`` on the disk or the lower half-plane."""
    c = complex(c)
    if support not in ("disk", "lower"):
        raise DomainError("constant coefficients live on the disk or the lower half-plane")
    return BeltramiCoefficient(lambda w: np.full(np.shape(w), c), support, abs(c), {"kind": "const", "value": [c.real, c.imag], "support": support})


def boxed_coefficient(boxes, value=1.0):
    """``value`` times the indicator of a union of reflected grid boxes."""
    value = complex(value)
    triples = [b.triple() if isinstance(b, NAdicBox) else [int(t) for t in b] for b in boxes]
    if not triples:
        raise DomainError("need at least one box")
    return BeltramiCoefficient(
        lambda w: np.full(np.shape(w), value),
        "boxes",
        abs(value),
        {"kind": "boxed", "value": [value.real, value.imag], "boxes": triples},
    )


def mu_from_bloch(b):
    """Coefficient whose transform reproduces ``b`` up to a constant.

    Disk: ``mu_b(w) = (1 - |w|^2) b'(w) / conj(w)``; unbounded near 0, which the
    polar quadratures absorb (``bound`` is ``inf``).  Half-plane:
    ``mu_b(w) = -2i |Im w| b'(conj w)`` on the lower half-plane.  The
    derivative kernel ``(w - z)^-3`` is analytic in ``w``, so ``mu_b`` must be
    anti-analytic up to the weight; with this choice ``(S# mu_b)' = b'``.
    """
    params = {"kind": "from_bloch", "function": b.label}
    if b.meta.get("periodic"):
        params["period"] = 1.0
    if b.domain == DISK:
        def ev(w):
            return (1.0 - np.abs(w) ** 2) * b.derivative(w) / np.conj(w)

        return BeltramiCoefficient(ev, "disk", float("inf"), params)

    def ev(w):
        return -2j * np.abs(w.imag) * b.derivative(np.conj(w))

    bound = b.norm_bound if b.norm_bound is not None else float("nan")
    return BeltramiCoefficient(ev, "lower", bound, params)


def _check_source(source, n):
    if source.n != n:
        raise DomainError(f"source box belongs to the {source.n}-adic grid, not the {n}-adic one")


def periodize(mu, source, n):
    """Extend ``mu`` from one reflected grid box to every box by real affine maps.

    On box ``(j, k)`` the value is ``mu(L^{-1} w)`` where ``L(w) = a w + b``
    (``a = n^(k0 - k) > 0``) carries the source box ``(j0, k0)`` onto it.
    """
    source = NAdicBox(source.n, source.j, source.k, True)
    _check_source(source, n)
    j0, k0 = source.j, source.k

    def ev(w):
        w = np.asarray(w, dtype=complex)
        j, k = box_indices(np.conj(w), n)
        a = np.power(float(n), (k0 - k).astype(float))
        shift = (j - j0) / np.power(float(n), k.astype(float))
        src = (w - shift) / a
        inside = source.contains(src)
        # guard against round-off pushing a point just across the source edge
        if not np.all(inside):
            x0, x1 = source.interval
            y0, y1 = source.heights
            re = np.clip(src.real, x0, np.nextafter(x1, x0))
            im = -np.clip(-src.imag, y0, np.nextafter(y1, y0))
            src = re + 1j * im
        return mu(src)

    params = {"kind": "periodic", "n": int(n), "source": source.triple(), "base": mu.params}
    return BeltramiCoefficient(ev, "periodic", mu.bound, params)


def damp_boundary(mu_per, S):
    """Multiply by ``h/S`` where the distance ``h`` to the containing box's boundary is below ``S``."""
    if S <= 0:
        raise DomainError(f"damping width must be positive, got {S}")
    n = mu_per.params.get("n")
    if n is None:
        raise DomainError("damping needs a periodic coefficient (grid base unknown)")

    def ev(w):
        w = np.asarray(w, dtype=complex)
        h = boundary_distance_in_grid(w, n)
        return np.minimum(h / S, 1.0) * mu_per(w)

    params = {"kind": "damped", "S": float(S), "n": int(n), "base": mu_per.params}
    return BeltramiCoefficient(ev, mu_per.support, mu_per.bound, params)


def splice_outside_ball(mu, center, R, outside):
    """``mu`` on the hyperbolic ball ``B(center, R)`` of the lower half-plane, ``outside`` elsewhere."""
    center = complex(center)
    if center.imag >= 0:
        raise DomainError("ball centre must lie in the lower half-plane")

    def ev(w):
        w = np.asarray(w, dtype=complex)
        inside = distance(w, center, "half-plane") < R
        return np.where(inside, mu(w), outside(w))

    params = {
        "kind": "spliced",
        "center": [center.real, center.imag],
        "R": float(R),
        "inside": mu.params,
        "outside": outside.params,
    }
    return BeltramiCoefficient(ev, "lower", max(mu.bound, outside.bound), params)


def _function_from_label(label):
    # exponential conjugates are labelled exp(<spec>) and are not part of the mini-language
    if label.startswith("exp(") and label.endswith(")"):
        return conjugate_exponential(_function_from_label(label[4:-1]))
    return parse_function_spec(label)


def coefficient_from_json(text):
    """Rebuild a coefficient from :meth:`BeltramiCoefficient.to_json` output."""
    spec = json.loads(text) if isinstance(text, str) else dict(text)
    kind = spec.get("kind")
    if kind == "const":
        re, im = spec["value"]
        return constant_coefficient(complex(re, im), spec.get("support", "lower"))
    if kind == "boxed":
        re, im = spec["value"]
        return boxed_coefficient(spec["boxes"], complex(re, im))
    if kind == "from_bloch":
        return mu_from_bloch(_function_from_label(spec["function"]))
    if kind == "periodic":
        base = coefficient_from_json(spec["base"])
        return periodize(base, NAdicBox.from_triple(spec["source"], True), spec["n"])
    if kind == "damped":
        return damp_boundary(coefficient_from_json(spec["base"]), spec["S"])
    if kind == "spliced":
        re, im = spec["center"]
        return splice_outside_ball(coefficient_from_json(spec["inside"]), complex(re, im), spec["R"], coefficient_from_json(spec["outside"]))
    raise ValueError(f"unknown coefficient kind {kind!r}")
