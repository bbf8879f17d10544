"""Steiner symmetrization of the volume-one l_p ball.

A uniform point X of the body is moved to Y by keeping its projection onto
theta^perp and redrawing its theta-coordinate uniformly on the centered fiber
of the same length.  Y is then uniform on the symmetral.  Symmetrization
can only lower the fourth moment along theta (up to noise); along a
coordinate axis the ball is already symmetric and nothing changes.

Run:  python3 demos/05_steiner_symmetrization.py
"""
from lpvariance import steiner
from lpvariance.rand_core import RngStream
from lpvariance.weights import Direction

st = RngStream(seed=5, stream_id=5)

c = steiner.chord(1.0, 3, Direction.axis(3, 2), [0.5, 0.0, 0.0])
print(f"fiber of B_1^3 over (0.5, 0): [{c.a:.3f}, {c.b:.3f}]")
body = steiner.isotropic_spec(1.5, 3)
print(f"volume-one B_1.5^3: scale = {body.scale:.4f}, L_K^2 = {body.lk2:.5f}\n")

for label, d in (("axis", Direction.axis(3, 2)), ("haar", Direction.haar(st.child(0), 3))):
    r = steiner.steiner_variance_compare(1.5, 3, d, 500_000, st.child(1).child(len(label)))
    print(f"theta={label}: Var|X|^2={r['var_x'].mean:.6f}  Var|Y|^2={r['var_y'].mean:.6f}  "
          f"diff={r['diff'].mean:+.2e} +- {r['diff'].stderr:.1e}")
    g = r["e_theta4_gap"]
    print(f"   E<.,theta>^4: X {r['e_theta4_x'].mean:.6f}  Y {r['e_theta4_y'].mean:.6f}  "
          f"X - Y = {g.mean / g.stderr:+.1f} sigma;  "
          f"R_X={r['ratio_x'].mean:.3f} R_Y={r['ratio_y'].mean:.3f}")

d = Direction.haar(st.child(2), 8)
r = steiner.projection_decomposition_check(3.0, 8, d, 300_000, st.child(3))
print(f"\nn=8, p=3: |sqrt Var|X|^2 - sqrt Var|P_E X|^2| <= sqrt Var|P_E^perp X|^2 "
      f"with margin {r['margin'].mean:.4f}")
