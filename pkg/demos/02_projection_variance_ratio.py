"""Variance of |X|^2 for X uniform on a hyperplane projection of B_p^n.

The uniform measure on P_H(B_p^n), H = theta^perp, is a reweighting of the
cone measure by psi_theta(G) = |sum |g_i|^(p-1) sign(g_i) theta_i|, so one
weighted sample pool gives E|X|^2, Var|X|^2, the covariance and its top
eigenvalue lambda^2.  We print the ratio R = Var|X|^2 / (lambda^2 E|X|^2),
which stays bounded as n grows.

Run:  python3 demos/02_projection_variance_ratio.py
"""
from lpvariance import ProjectedBodySpec, variance_report
from lpvariance.rand_core import RngStream
from lpvariance.weights import Direction

root = RngStream(seed=7, stream_id=2)

# Sanity anchor: for p = 2 the projection is a Euclidean disk, R = 2/3.
disk = variance_report(ProjectedBodySpec(2.0, 3, Direction.axis(3, 2)), 500_000, root.child(0))
print(f"disk: E|X|^2={disk.e_norm2.mean:.4f} Var={disk.var_norm2.mean:.5f} "
      f"lambda^2={disk.lambda2:.4f} R={disk.ratio.mean:.4f} (exact 0.6667)")

print("\n   n      p   R        R/log(1+p)  n^(1-4/p)")
for n in (8, 32):
    for p in (1.0, 4.0, 16.0):
        theta = Direction.haar(root.child(n).child(int(p)), n)
        rep = variance_report(ProjectedBodySpec(p, n, theta), 100_000, root.child(1000 + n).child(int(p)))
        print(f"{n:4d} {p:6g}   {rep.ratio.mean:.4f}   {rep.ratio_over_log1p:.4f}      {rep.scale:.3g}")

# The four summands that bound Var|X|^2 come from the same pool.
print("\nbound terms at p=4, n=32:", [round(t.mean, 5) for t in rep.terms],
      "Var =", round(rep.var_norm2.mean, 5))
