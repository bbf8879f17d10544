"""The Orlicz function M for X = |g|^(p-1) and the Luxemburg norm.

E phi_theta = E (sum |g_i|^(2p-2) theta_i^2)^(1/2) is comparable to the
Luxemburg norm ||theta||_M.  This script tabulates M, solves for a few norms
and compares them with Monte Carlo.

Run:  python3 demos/04_orlicz_norm.py
"""
import numpy as np

from lpvariance.orlicz import eval_M, luxemburg_certificate, luxemburg_norm, orlicz_for, orlicz_vs_mc
from lpvariance.rand_core import RngStream
from lpvariance.weights import Direction

m = orlicz_for(2.0)
s = np.array([0.1, 0.5, 1.0, 2.0, 10.0])
print("p=2:  s    :", s)
print("      M(s) :", np.round(eval_M(m, s), 6))
print("M is quadratic near 0 and linear at infinity.\n")

x = np.ones(16) / 4
rho = luxemburg_norm(m, x)
print(f"||(1/4,...,1/4)||_M = {rho:.6f}; sum M(|x_i|/rho) = {luxemburg_certificate(m, x, rho):.12f}")

st = RngStream(seed=4, stream_id=4)
print("\n  p    n   theta   E phi / ||theta||_M")
for p in (1.5, 2.0, 4.0):
    for n in (16, 64):
        for name, d in (("diag", Direction.diag(n)), ("haar", Direction.haar(st.child(n), n))):
            r = orlicz_vs_mc(p, n, d, 100_000, st.child(int(10 * p)).child(n).child(len(name)))
            print(f"{p:4g} {n:4d}   {name:5}   {r.mean:.3f}")
