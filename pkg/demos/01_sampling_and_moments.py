"""Sampling the l_p machinery and checking it against closed-form moments.

Run:  python3 demos/01_sampling_and_moments.py
"""
import numpy as np

from lpvariance import specfun
from lpvariance.batching import mean_estimate, run_batches
from lpvariance.rand_core import RngStream, sample_ball_uniform, sample_cone, sample_gg, sample_gs

stream = RngStream(seed=2016, stream_id=1)

# A generalized Gaussian has density exp(-|t|^p) / (2 Gamma(1 + 1/p)).
# Its absolute moments are ratios of Gamma functions, which gives us a
# sharp test of the sampler for every p.
print("E|g|^alpha: empirical vs closed form")
for p in (1.0, 1.5, 3.0, 8.0):
    z, bs = run_batches(stream.child(int(10 * p)), 400_000,
                        lambda s, b: [np.mean(np.abs(sample_gg(s, p, b)) ** 4)])
    est = mean_estimate(z[:, 0], bs)
    print(f"  p={p:<4} alpha=4  {est.mean:.5f} +- {est.stderr:.5f}   exact {specfun.moment_g(p, 4):.5f}")

# Stacking n copies gives G; S = ||G||_p has its own Gamma-ratio moments.
gs = sample_gs(stream.child(100), 3.0, 8, 200_000)
print(f"\nE S^2 for p=3, n=8: {np.mean(gs.s ** 2):.4f}  exact {specfun.moment_S(3.0, 8, 2):.4f}")

# G/S lies on the unit sphere of l_p and is distributed by cone measure,
# independently of S.  The correlation between ||G/S||_inf and S is ~ 0.
y = gs.g / gs.s[:, None]
r = np.corrcoef(np.abs(y).max(axis=1), gs.s)[0, 1]
print(f"corr(||G/S||_inf, S) = {r:+.4f}   (noise level ~ {1 / np.sqrt(len(y)):.4f})")

cone = sample_cone(stream.child(101), 1.5, 5, 5).y
print("\ncone points, l_1.5 norms:", np.round(np.sum(np.abs(cone) ** 1.5, axis=1) ** (1 / 1.5), 14))

# Scaling a cone point by U^(1/n) gives a uniform point of the ball.
x = sample_ball_uniform(stream.child(102), 2.0, 2, 400_000)
print(f"uniform disk: E|X|^2 = {np.mean((x ** 2).sum(1)):.4f}  (exact 1/2)")
