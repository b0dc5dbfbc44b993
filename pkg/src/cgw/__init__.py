"""Coulomb-gas solution-space toolkit.

Arc-diagram combinatorics, meander matrices, numerically evaluated
contour-integral basis functions, connectivity weights, crossing
probabilities, and Frobenius-series interval classification for the
null-state + Ward PDE system of multiple SLE.
"""
from .config import FDConfig, LadderConfig, QuadConfig, RunConfig, load_config
from .coulomb import (ContourKind, ContourSpec, CoulombGasSpec, EvalResult,
                      PointConfig, build_spec, evaluate_basis,
                      evaluate_dotsenko_fateev_kernel, dotsenko_fateev_rhs)
from .diagrams import (ArcDiagram, ConnectivityIndex, catalan, cut_map_chi,
                       chi_index, diagram_index, enumerate_connectivities,
                       loop_count)
from .evaluators import BasisCombination, ScalarFunction, basis_value
from .frobenius import (CftIntervalType, FrobeniusFit, IntervalClassification,
                        SleIntervalType, classify_interval,
                        conditioned_probability_limits, detect_log_term,
                        fit_expansion)
from .limits import (CollapseError, CollapseStep, LimitSequence, apply_L,
                     collapse_at_infinity, collapse_limit, collapse_sequence,
                     limit_sequence)
from .meander import (EightOverKappaClass, ExceptionalSpeed, MeanderMatrix,
                      SpeedContext, build_meander_matrix, central_charge,
                      determinant_zeros, fugacity, is_exceptional,
                      meander_zero, numeric_rank, rank_at_zero,
                      sign_relation_check)
from .pde import null_state_residual, phi13_residual, ward_residuals
from .weights import (CrossingDistribution, SingularSpeedError, WeightVector,
                      build_theta, crossing_probabilities, decompose,
                      fusion_power, multi_collapse_limit, regularized_basis_element,
                      regularized_weights, rainbow_extended_basis_check,
                      solve_weights, theta_identity_report, weight_evaluator)
from . import cft

__version__ = "0.1.0"
