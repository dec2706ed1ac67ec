"""Exact construction, verification, and analysis of self-similar qudit states."""

from .analyze import (
    CheckResult,
    LocalCliffordMatch,
    ScalingReport,
    StepReport,
    fractal_dimension,
    lu_equivalent_by_local_clifford,
    probability_scaling_ratio,
    product_cut_report,
    rule_basis_probabilities,
    single_qubit_cliffords,
    verify_scale_step,
)
from .codes import (
    CodeKind,
    CodeSpec,
    DecodeReport,
    decode_majority,
    encode,
    inject_errors,
    roundtrip_check,
)
from .construct import (
    BasisSlot,
    Coefficient,
    FractalParams,
    NamedSlot,
    Predecessor,
    ScaleRule,
    apply_scale_rule,
    build_bell_pair,
    build_bitflip_state,
    build_cantor,
    build_cluster,
    build_gem_sequence,
    build_gem_step,
    build_initial,
    build_representative,
    gem_rule,
    representative_rule,
)
from .errors import (
    AmplitudeOverflowError,
    AnalysisError,
    CodeError,
    DimensionMismatchError,
    FormatError,
    GuardExceededError,
    QfsError,
    ScaleRuleError,
)
from .fileio import (
    load_rule,
    load_state,
    parse_rule,
    parse_state,
    render_support,
    save_rule,
    save_state,
    serialize_rule,
    serialize_state,
)
from .states import Amplitude, Provenance, SparseState, superpose

__version__ = "0.1.0"

__all__ = [
    "Amplitude",
    "AmplitudeOverflowError",
    "AnalysisError",
    "BasisSlot",
    "CheckResult",
    "CodeError",
    "CodeKind",
    "CodeSpec",
    "Coefficient",
    "DecodeReport",
    "DimensionMismatchError",
    "FormatError",
    "FractalParams",
    "GuardExceededError",
    "LocalCliffordMatch",
    "NamedSlot",
    "Predecessor",
    "Provenance",
    "QfsError",
    "ScaleRule",
    "ScaleRuleError",
    "ScalingReport",
    "SparseState",
    "StepReport",
    "apply_scale_rule",
    "build_bell_pair",
    "build_bitflip_state",
    "build_cantor",
    "build_cluster",
    "build_gem_sequence",
    "build_gem_step",
    "build_initial",
    "build_representative",
    "decode_majority",
    "encode",
    "fractal_dimension",
    "gem_rule",
    "inject_errors",
    "load_rule",
    "load_state",
    "lu_equivalent_by_local_clifford",
    "parse_rule",
    "parse_state",
    "probability_scaling_ratio",
    "product_cut_report",
    "render_support",
    "representative_rule",
    "roundtrip_check",
    "rule_basis_probabilities",
    "save_rule",
    "save_state",
    "serialize_rule",
    "serialize_state",
    "single_qubit_cliffords",
    "superpose",
    "verify_scale_step",
]
