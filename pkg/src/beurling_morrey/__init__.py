"""Beurling-Ahlfors transform, commutators and Beltrami solves on weighted Morrey spaces, on a periodic grid."""

from .grid import (ComplexField, GridError, GridSpec, Square, field_from_array, integrate_over_square,
                   make_grid, mean_over_square, restrict, sample, sample_count, square_mask)
from .transforms import (CutoffProfile, DEFAULT_CUTOFF, beurling, beurling_maximal, beurling_multiplier,
                         beurling_power, beurling_quadrature, cauchy, commutator_truncation_gap, grid_mode,
                         hl_maximal, hl_maximal_centered, kernel_b, truncated_commutator, wirtinger)
from .fields import (gaussian, random_bandlimited, smooth_bump, truncated_log)
from .weights import (ApReport, Weight, WeightError, ap_constant, centered_family, constant_weight,
                      doubling_check, dyadic_family, power_weight, product_power_weight, sigma_estimate,
                      weighted_measure)
from .morrey import (MorreyParams, default_morrey_family, fk_diagnostics, morrey_norm, morrey_terms,
                     weighted_lp_over_square)
from .oscillation import (bmo_norm, cmo_probe, lattice_family, mean_oscillation, median_oscillation,
                          median_value, oscillation_report)
from .commutator import (CommutatorError, ProductSets, TestFamily, build_test_family, commutator_apply,
                         commutator_off_support, family_invariants, lower_upper_bounds,
                         oscillation_vs_commutator, product_set_invariants, product_sets,
                         separation_experiment)
from .beltrami import (BeltramiError, BeltramiProblem, SolveReport, apriori_ratio, neumann_invert,
                       norm_growth_probe, solve_beltrami)

__version__ = "0.1.0"

__all__ = [
    "ComplexField",
    "GridError",
    "GridSpec",
    "Square",
    "field_from_array",
    "integrate_over_square",
    "make_grid",
    "mean_over_square",
    "restrict",
    "sample",
    "sample_count",
    "square_mask",
    "CutoffProfile",
    "DEFAULT_CUTOFF",
    "beurling",
    "beurling_maximal",
    "beurling_multiplier",
    "beurling_power",
    "beurling_quadrature",
    "cauchy",
    "commutator_truncation_gap",
    "grid_mode",
    "hl_maximal",
    "hl_maximal_centered",
    "kernel_b",
    "truncated_commutator",
    "wirtinger",
    "gaussian",
    "random_bandlimited",
    "smooth_bump",
    "truncated_log",
    "ApReport",
    "Weight",
    "WeightError",
    "ap_constant",
    "centered_family",
    "constant_weight",
    "doubling_check",
    "dyadic_family",
    "power_weight",
    "product_power_weight",
    "sigma_estimate",
    "weighted_measure",
    "MorreyParams",
    "default_morrey_family",
    "fk_diagnostics",
    "morrey_norm",
    "morrey_terms",
    "weighted_lp_over_square",
    "bmo_norm",
    "cmo_probe",
    "lattice_family",
    "mean_oscillation",
    "median_oscillation",
    "median_value",
    "oscillation_report",
    "CommutatorError",
    "ProductSets",
    "TestFamily",
    "build_test_family",
    "commutator_apply",
    "commutator_off_support",
    "family_invariants",
    "lower_upper_bounds",
    "oscillation_vs_commutator",
    "product_set_invariants",
    "product_sets",
    "separation_experiment",
    "BeltramiError",
    "BeltramiProblem",
    "SolveReport",
    "apriori_ratio",
    "neumann_invert",
    "norm_growth_probe",
    "solve_beltrami",
]
