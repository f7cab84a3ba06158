"""The modified Beurling transform on the lower half-plane.

Three facts, checked numerically:

* the Beltrami coefficient built from a Bloch function b is mapped back to
  b' by the transform;
* for |mu| <= 1 the hyperbolic size of the derivative is at most 8/pi, with
  equality for the coefficient aligned with the kernel;
* the value at z only depends, up to a small error, on mu near conj(z): a
  modification outside a hyperbolic ball of radius R barely matters once R
  is large.

Run with ``python3 demos/beurling_locality.py`` (about half a minute).
"""

import math

import numpy as np

from blochlab import blochlib
from blochlab.transforms import (
    BeltramiCoefficient,
    beurling_modified,
    beurling_quotient,
    constant_coefficient,
    locality_gap,
    mu_from_bloch,
    splice_outside_ball,
)

b = blochlib.conjugate_exponential(blochlib.make_special(0.3))
mu = mu_from_bloch(b)
for z in (1j, 0.2 + 0.5j):
    _, d = beurling_modified(mu, z, tol=1e-8)
    print(f"(S mu_b)'({z}) = {d:.10f}   b'({z}) = {complex(b.derivative(z)):.10f}")

z = 0.3 + 0.7j
extremal = BeltramiCoefficient(lambda w: (w - z) ** 3 / np.abs(w - z) ** 3, "lower", 1.0)
print(f"\nextremal coefficient: |2 (S mu)'/rho| = {abs(beurling_quotient(extremal, z, 1e-7)):.8f}, 8/pi = {8 / math.pi:.8f}")

print("\nlocality: replace mu by -1 outside B(-i, R) and compare at i")
base = constant_coefficient(1.0)
for R in (1.0, 2.0, 4.0, 8.0):
    gap = locality_gap(base, splice_outside_ball(base, -1j, R, constant_coefficient(-1.0)), 1j, R, tol=1e-4)
    print(f"  R = {R:3.0f}: gap {gap:.5f}")
