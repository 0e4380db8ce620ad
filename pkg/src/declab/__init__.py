"""declab: a numerical verification lab for parabola decoupling.

Evaluates extension-operator functionals with certified quadrature,
computes their exact exponential-sum counterparts, and mechanizes the
explicit-constant recursion in extended-range log arithmetic.
"""

__version__ = "0.1.0"

from .geometry import DyadicInterval, Square, partition_interval, partition_square
from .symbols import (SymbolFunction, constant_one, explicit, single_bump,
                      unimodular_random, rescale_symbol)
from .quadrature import QuadratureSpec
from .field import FieldGrid, build_field, eval_extension
from .norms import norm_lp, weight_value
from .extscalar import ExtScalar, ext_arith
from .arithmetic import (ArithParams, CoefficientVector, SolutionTally,
                         congruencing_step_ratio, count_I1_class, count_I1_max,
                         count_J, count_J_bruteforce, discrete_restriction_ratio,
                         lifting_identity_check, torus_grid_integral,
                         weighted_sixth_moment)
from .functionals import (NormCache, RatioReport, ScaleParams,
                          ball_inflation_ratio, ball_inflation_s_ratio,
                          bilinear_ratio, bilinear_weighted_ratio,
                          check_bernstein, check_bilinear_reduction,
                          check_block_average_consistency,
                          check_l2l2_decoupling, check_local_refinement,
                          check_pairing_suppression, check_switch_holder,
                          interpolated_bilinear_ratio, linear_ratio,
                          local_bilinear_ratio, pairing_suppression_sweep,
                          search_lower_bound)
from .recursion import (BootstrapState, BoundHypothesis, LogBound,
                        almost_mult, bilinear_chain, bootstrap_fixed_point,
                        decoupling_recursion, exponent_contraction_check,
                        log_decoupling_bound, recursion_variants,
                        refine_all_scales, refine_restricted)
from .config import SuiteSpec, load_spec
from .suites import RunRecord, run_suite
from .report import emit_report, payload_bytes
