"""How E psi_theta scales with p and with the direction.

Run:  python3 demos/03_weight_scaling.py
"""
import math

from lpvariance import weights
from lpvariance.rand_core import RngStream
from lpvariance.weights import Direction

s = RngStream(seed=3, stream_id=3)

# On the diagonal direction, sqrt(p) E psi stays of order one while p <= n,
# and (p / sqrt(n)) E psi takes over once p passes n.
print("   n       p  regime  normalized E psi")
for n, p in ((16, 1.0), (16, 4.0), (16, 16.0), (4, 16.0), (8, 64.0)):
    r = weights.epsi_scaling_check(p, n, 100_000, s.child(n).child(int(p)))
    print(f"{n:4d} {p:7g}  {r['regime']:5}   {r['normalized']:.3f} +- {r['normalized_se']:.3f}")

# For very large p the weight is carried by the single largest |g_i|, and
# p E psi / ||theta||_1 approaches 1.
for name, d in (("diag", Direction.diag(4)), ("e1", Direction.axis(4, 0))):
    r = weights.remark_ratio(800.0, d, 1_000_000, s.child(99).child(len(name)))
    print(f"p=800, theta={name}: p E psi / ||theta||_1 = {r.mean:.3f} +- {r.stderr:.3f}")

# Dropping coordinates from the sum never increases E psi.
d = Direction.haar(s.child(7), 16)
r = weights.subset_psi_ratio(1.5, 16, d, range(0, 16, 2), 100_000, s.child(8))
print(f"\nsubset ratio (even coordinates only): {r.mean:.3f} <= 1")

est = weights.symmetric_sum_moment(2.0, 32, 2, 400_000, s.child(9), root=False)
print(f"E(sum g_i^2 - g'_i^2)^2 at p=2, n=32: {est.mean:.2f}  exact {weights.symmetric_sum_second_moment(2.0, 32):.2f}")
print(f"Haar fraction above 5% of the diagonal value (p=4, n=32): "
      f"{weights.haar_direction_fraction(4.0, 32, 50, 30_000, s.child(10)):.2f}")
print(f"(sqrt(32) = {math.sqrt(32):.2f} is the worst-case distortion between psi and phi)")
