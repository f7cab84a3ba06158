"""Interval averages of a Bloch function as an n-adic martingale.

Builds the tree of averages B_I over n-adic intervals for a periodic Bloch
function, reports the spread of the local variances per level, and compares
var_I B / log n with the average of |2 y b'|^2 over the box above I.  For
log z the comparison improves like 1/sqrt(log n).

Run with ``python3 demos/martingale_boxes.py``.
"""

import math

from blochlab import blochlib
from blochlab.martingale import build_martingale, compare_box_variance, variance_extremes
from blochlab.transforms import NAdicBox, collar_ratio

b = blochlib.conjugate_exponential(blochlib.make_special(0.57))
for n in (2, 4, 16):
    tree = build_martingale(b, n, 2, 1e-9)
    lo, hi = variance_extremes(tree, 0)
    lo1, hi1 = variance_extremes(tree, 1)
    print(f"n = {n:3d}: level 0 variance {hi:.5f}, level 1 range [{lo1:.5f}, {hi1:.5f}], log n = {math.log(n):.4f}")

print("\nbox comparison for log z:")
for n in (2, 4, 16, 256):
    d = compare_box_variance(blochlib.logz(), n)
    print(f"  n = {n:4d}: difference {d:.4f}, times sqrt(log n) {d * math.sqrt(math.log(n)):.4f}")

print("\nshare of a box within hyperbolic distance 1 of its boundary:")
for n in (4, 16, 256, 4096):
    print(f"  n = {n:5d}: {collar_ratio(NAdicBox(n, 0, 0), 1.0):.4f}")
