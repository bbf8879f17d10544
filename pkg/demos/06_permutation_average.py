"""Averages over permutations versus the decreasing-rearrangement formula.

Run:  python3 demos/06_permutation_average.py
"""
import math

import numpy as np

from lpvariance.permavg import (RearrangementInput, brute_avg_permutations,
                                rearrangement_functional, ratio_window_check)
from lpvariance.rand_core import RngStream

for n in (3, 5, 7):
    ones = RearrangementInput(np.ones((n, n)))
    print(f"all-ones n={n}: average {brute_avg_permutations(ones):.6f} (= sqrt n {math.sqrt(n):.6f}), "
          f"formula {rearrangement_functional(ones):.6f} (= 1 + sqrt(n-1))")

eye = RearrangementInput(np.eye(3))
print(f"\nidentity 3x3: average of sqrt(#fixed points) = {brute_avg_permutations(eye):.4f}")

res = ratio_window_check(20, 6, 2.0, RngStream(seed=6, stream_id=6))
print(f"20 random 6x6 matrices: ratio in [{res['min']:.3f}, {res['max']:.3f}]")
