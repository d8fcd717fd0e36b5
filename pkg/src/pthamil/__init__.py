"""pthamil: inner products and metric operators for finite-dimensional
Hamiltonians with antilinear (PT-type) symmetry.

The package constructs and cross-checks the three candidate inner products of
such Hamiltonians — the metric (V) norm, the phase-corrected PT-conjugate
norm, and the PV / C-operator norm — and reports when each exists, when they
coincide, and how they fail at exceptional points or for conjugate-pair
spectra.
"""

__version__ = "0.1.0"

from .antilinear import (
    AntilinearOp,
    PTFrame,
    PTPhases,
    fix_pt_phases,
    make_frame,
    make_two_level_frame,
    pt_conjugate_inner,
    pt_eigenphase,
    pt_gram,
)
from .cpt import (
    CommutantOp,
    SpectrumDiagnostic,
    build_c,
    build_pv,
    c_pt_diagnostic,
    check_p_intertwines,
    p_normalize,
    pair_completeness_check,
)
from .errors import (
    CoefficientOverflow,
    ConvergenceFailure,
    InvalidFrame,
    NonDiagonalizable,
    NotCommuting,
    NotPTEigenstate,
    NotRealPhase,
    NotRealSpectrum,
    ParseError,
    PTHamilError,
    Singular,
    UnpairedComplexEigenvalue,
)
from .fockdemo import (
    DivergenceWitness,
    FockExpansion,
    divergence_witness,
    expand_position_state,
    oscillator_contrast,
    truncated_position_matrix,
)
from .intertwiner import (
    Intertwiner,
    NormReport,
    TimeIndependence,
    build_metric,
    build_similarity,
    evolution_operator,
    metric_transform,
    v_gram,
    verify_time_independence,
)
from .linalg import (
    DEFAULT_TOL,
    EigenSystem,
    adjoint,
    as_matrix,
    eigendecompose,
    identity,
    inverse,
)
from .pipeline import AnalysisConfig, AnalysisReport, emit_report, parse_report, run_analyze, run_batch
from .spectra import (
    SpectrumClass,
    SpectrumKind,
    antilinear_symmetry_check,
    classify,
    detect_exceptional,
)
from .twolevel import TwoLevelModel, closed_forms, compare_with_pipeline, hamiltonian, pt_symmetry_conditions

__all__ = [name for name in dir() if not name.startswith("_")]
