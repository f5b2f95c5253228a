"""Discrete variation analysis and stability certificates for residual-style
difference equations.

Layers: series containers and triangular arrays (`series`), p-variation and
controls (`pvar`), the level-2 lift (`lift`), sewing/Gronwall machinery
(`sewing`), difference-equation solves and remainder decompositions (`cde`),
explicit-constant certificates (`bounds`), and a CLI (`cli`).
"""
from .series import NormChoice, TimeSeries, TriangularArray, delta, increments
from .pvar import (Control, control_convex_map, control_product, pvar,
                   pvar_control, pvar_grid)
from .lift import LiftedSeries, homogeneous_norm, lift, rho_p
from .sewing import (GronwallInput, HypothesisViolation, SewingBudget,
                     SewingReport, check_generalized_sewing,
                     check_sewing_bound, defect_norms,
                     discrete_gronwall_bound, rough_gronwall_bound,
                     sewing_defect, zeta_partial)
from .cde import (SolutionBundle, VectorFieldSystem, F_fields, derivative_sup,
                  embed_resnet, estimate_cnb_norm, remainders, resnet_forward,
                  solve, tanh_matvec)
from .bounds import (Certificate, ConstantsTable, RegimeError, constants,
                     onevar_stability_bound, rough_apriori, rough_stability,
                     young_apriori, young_stability)

__version__ = "0.1.0"

__all__ = [
    "NormChoice", "TimeSeries", "TriangularArray", "delta", "increments",
    "Control", "pvar", "pvar_control", "pvar_grid", "control_convex_map",
    "control_product",
    "LiftedSeries", "lift", "homogeneous_norm", "rho_p",
    "zeta_partial", "sewing_defect", "defect_norms", "SewingBudget",
    "SewingReport", "check_sewing_bound", "check_generalized_sewing",
    "discrete_gronwall_bound", "GronwallInput", "HypothesisViolation",
    "rough_gronwall_bound",
    "VectorFieldSystem", "SolutionBundle", "solve", "remainders", "F_fields",
    "tanh_matvec", "resnet_forward", "embed_resnet", "derivative_sup",
    "estimate_cnb_norm",
    "RegimeError", "ConstantsTable", "constants", "Certificate",
    "onevar_stability_bound", "young_apriori", "young_stability",
    "rough_apriori", "rough_stability",
    "__version__",
]
