"""Certify the explicit variance bound with interval arithmetic.

Walks through the sub-bounds behind the certificate at r = 2/5: the two
coefficient tails, the Parseval bound on |q_3|^2, the two scans over the
extremal family, and the two branch bounds whose maximum stays below 0.8998.

Run with ``python3 demos/certify_variance_bound.py``.
"""

from fractions import Fraction

from blochlab.certify import certify_sigma, parseval_q3_bound, scan_special, tail_bound

r = Fraction(2, 5)

print("Tails of the Cauchy-estimate series (enclosures):")
for K in (3, 4):
    print(f"  K = {K}: {tail_bound(r, K)}")

print("\nParseval bound on |q_3|^2 at s^2 = 0.58:")
print(f"  {parseval_q3_bound(Fraction(58, 100))}  (claim: <= 22.16)")

print("\nScans over the extremal family, a in [0, 1]:")
b1 = scan_special("b1", r)
print(f"  b1 margin {b1.margin}; it vanishes only near a in [{float(b1.zero_set[0]):.7f}, {float(b1.zero_set[1]):.7f}]")
b4 = scan_special("b4", r)
print(f"  b4 margin {b4.margin}, minimum near a = {float(b4.argmin):.5f}")

cert = certify_sigma(r)
print("\nBranch bounds:")
print(f"  |q_2| <= 2: {cert.branch1}")
print(f"  |q_2| >= 2: {cert.branch2}")
print(f"  final {cert.final_bound} -> {cert.claim}: {cert.status}")

print("\nThe same certificate at 200 bits, for audit:")
cert200 = certify_sigma(r, precision=200, grid=200)
print(f"  branch1 {cert200.branch1}")
print(f"  width {float(cert200.branch1.width):.1e}, status {cert200.status}")
