"""Deterministic grid oracles in two and three dimensions.

Run:  python3 demos/07_quadrature_oracles.py
"""
import math

from lpvariance.oracle_quad import quad_epsi, quad_moments_ball, quad_moments_projection
from lpvariance.projest import ProjectedBodySpec, estimate_ef
from lpvariance.rand_core import RngStream
from lpvariance.weights import Direction

r = quad_moments_ball(1.0, 2, [(2, 0), (0, 2)])
print(f"E|X|^2 on the diamond: {r.value:.8f} (exact 1/3), refinement delta {r.delta:.1e}")

r = quad_epsi(1.5, 2, Direction.axis(2, 0))
print(f"E psi, p=1.5, theta=e1: {r.value:.8f} (exact {1 / math.gamma(1 / 1.5):.8f})")

d = Direction.haar(RngStream(seed=8, stream_id=8), 3)
norm2 = lambda x: (x * x).sum(axis=1)
oracle = quad_moments_projection(1.5, 3, d, norm2)
mc = estimate_ef(ProjectedBodySpec(1.5, 3, d), norm2, 1_000_000, RngStream(seed=8, stream_id=9))
print(f"projection of B_1.5^3: quadrature {oracle.value:.5f}, Monte Carlo {mc.mean:.5f} +- {mc.stderr:.5f}")
