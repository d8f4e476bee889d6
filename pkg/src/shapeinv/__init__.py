"""Shape-invariant potentials, ladder algebras and Klein-Gordon bound states."""

from .algebra import (
    AlgebraReport,
    RSequence,
    TowerState,
    algebra_report,
    classify_algebra,
    commutator_residual,
    r_sequence,
    structure_residuals,
    verify_structure_constants,
)
from .families import (
    CaseSpec,
    FiveParamExp,
    HarmonicKG,
    MorseKG,
    case_round_trip,
    default_grid,
    effective_potential,
    eval_case_closed_form,
    eval_five_param,
    specialize,
    superpotential_spec,
)
from .numerics import Grid, GridFunction, TridiagonalOperator, build_grid
from .spectrum import (
    EnergyLevel,
    SolveConfig,
    SpectrumResult,
    analytic_epsilon,
    analytic_level,
    analytic_spectrum,
    compare_spectra,
    numeric_levels,
    numeric_spectrum,
)
from .susy import (
    SuperpotentialSpec,
    factorization_offset,
    ground_state,
    partner_potentials,
    shape_invariance_residual,
    tower_state,
)

__all__ = [
    "algebra_report",
    "AlgebraReport",
    "analytic_epsilon",
    "analytic_level",
    "analytic_spectrum",
    "build_grid",
    "case_round_trip",
    "CaseSpec",
    "classify_algebra",
    "commutator_residual",
    "compare_spectra",
    "default_grid",
    "effective_potential",
    "EnergyLevel",
    "eval_case_closed_form",
    "eval_five_param",
    "factorization_offset",
    "FiveParamExp",
    "Grid",
    "GridFunction",
    "ground_state",
    "HarmonicKG",
    "MorseKG",
    "numeric_levels",
    "numeric_spectrum",
    "partner_potentials",
    "r_sequence",
    "RSequence",
    "shape_invariance_residual",
    "SolveConfig",
    "specialize",
    "SpectrumResult",
    "structure_residuals",
    "superpotential_spec",
    "SuperpotentialSpec",
    "tower_state",
    "TowerState",
    "TridiagonalOperator",
    "verify_structure_constants",
]
