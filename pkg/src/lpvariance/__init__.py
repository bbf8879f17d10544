"""Monte Carlo and quadrature tools for uniform measures on hyperplane
projections of l_p^n balls: samplers, weighted estimators, the Orlicz norm,
Steiner symmetrization and permutation averages."""
from .batching import MomentEstimate
from .config import RunConfig, Windows
from .oracle_quad import (OracleUncertified, QuadConfig, quad_epsi, quad_moments_ball,
                          quad_moments_projection)
from .orlicz import OrliczM, eval_M, luxemburg_norm, orlicz_for
from .permavg import RearrangementInput, brute_avg_permutations, rearrangement_functional
from .projest import (DegenerateWeight, ProjectedBodySpec, estimate_ef, four_term_decomposition,
                      variance_report)
from .rand_core import RngStream, sample_ball_uniform, sample_cone, sample_gg, sample_gs
from .specfun import PExponent, moment_S, moment_g
from .steiner import chord, sample_steiner, steiner_variance_compare
from .weights import Direction, estimate_epsi

__version__ = "0.1.0"
