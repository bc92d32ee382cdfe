"""Central values of even Dirichlet L-functions with the root-number angle restricted.

Numerical companion for mollified moments twisted by powers of the root
number: character and Gauss-sum tables, central values through a smoothed
approximate functional equation (with a Hurwitz-zeta oracle), hyper-Kloosterman
sums, the Iwaniec--Sarnak mollifier in exact arithmetic, weighted, mollified
and smoothed moments, and restricted non-vanishing counts.
"""
from .arith import PrimeContext, build_context, find_primitive_root, get_context, mod_inverse
from .bumps import BumpSpec, bump_value, family_condition_check, fourier_coefficients
from .central import (AfeParams, CentralFamily, SmoothingSpec, central_family, central_value_afe,
                      central_value_hurwitz, completed_lambda, smoothing_V)
from .characters import Character, enumerate_even_primitive, gauss_sum_and_angle, orthogonality_sum
from .errors import (ConsistencyError, ConvergenceError, DomainError, PreconditionError, PrimalityError,
                     ResourceError, RootMomentsError)
from .kloosterman import KlTable, classical_kloosterman, correlation_diagnostics, kl_all, kl_point
from .mollifier import MollifierSet, build_mollifier, g_asymptotic_check, mollifier_value, unitary_convolution
from .moments import (MomentReport, afe_decomposition, first_moment, mollified_first, mollified_second,
                      second_moment, smoothed_moments)
from .nonvanish import NonvanishReport, angle_equidistribution, c_eta, nonvanishing_count

__version__ = "0.1.0"
