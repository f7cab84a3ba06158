"""Asymptotic variance of the lacunary series on circles and on horizontal lines.

For b(z) = sum z^(2^k) the circle mean of |b|^2 is a coefficient sum, and the
normalised variance tends to 1/log 2 slowly.  After the exponential change of
variables w -> e^(2 pi i w) the same quantity is measured on horizontal lines
in the upper half-plane; the two estimates agree at matched depth.

Run with ``python3 demos/lacunary_variance.py``.
"""

import math

from blochlab import blochlib, spectra

b = blochlib.lacunary(2)
strip_b = blochlib.conjugate_exponential(b)
print(f"target 1/log 2 = {1 / math.log(2):.6f}\n")
print(f"{'depth':>8} {'circle':>10} {'strip':>10} {'strip/circle':>13}")
for depth in (1e-2, 1e-4, 1e-6, 1e-8):
    circle = spectra.variance_circle(b, [1 - depth]).value
    strip = spectra.variance_strip(strip_b, depth).value
    print(f"{depth:8.0e} {circle:10.6f} {strip:10.6f} {strip / circle:13.4f}")

print("\nThe special functions behave the same way:")
s = blochlib.make_special(0.3)
for depth in (1e-3, 1e-6):
    circle = spectra.variance_circle(s, [1 - depth]).value
    strip = spectra.variance_strip(blochlib.conjugate_exponential(s), depth).value
    print(f"  special:0.3 depth {depth:.0e}: circle {circle:.6f}, strip {strip:.6f}")
