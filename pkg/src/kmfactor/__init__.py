"""Kac-Moody correction factor, symbolically and numerically.

The package builds the correction factor of a Kac-Moody root system two
ways: as an exact truncated series over the coroot lattice (``formal``)
and as a numerically evaluable function of ``(t, h)`` on the interior of
the Tits cone (``analytic``), with the root/Weyl combinatorics
(``cartan``, ``roots``, ``weyl``) shared underneath and a CLI on top.
"""

from .cartan import (
    GCM,
    ParabolicSubset,
    dual,
    is_w_finite,
    load_gcm,
    parabolic,
    to_json_dict,
    validate_gcm,
)
from .roots import (
    CompletionCount,
    RootEntry,
    RootTable,
    coroot_slice,
    count_parabolic_completions,
    enumerate_roots,
    pairing,
)
from .weyl import (
    PoincareSeries,
    WeylElement,
    WeylTable,
    build_tables,
    enumerate_weyl,
    estimate_radius,
    minimal_coset_reps,
    poincare,
)
from .formal import (
    CorrectionFactor,
    FormalSeries,
    MacdonaldCheck,
    WeylSumResult,
    correction_factor,
    delta_ratio,
    macdonald_identity_check,
    series_inv,
    series_mul,
    twisted_action,
    weyl_sum,
)
from .analytic import (
    AtlasOutcome,
    ConvergenceReport,
    EvalOutcome,
    Evaluator,
    FacetDescriptor,
    FacetStatus,
    InvarianceResult,
    SpectralPoint,
    apply_word,
    classify,
    reduce_to_dominant,
    reflect_pairings,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "GCM",
    "ParabolicSubset",
    "dual",
    "is_w_finite",
    "load_gcm",
    "parabolic",
    "to_json_dict",
    "validate_gcm",
    "CompletionCount",
    "RootEntry",
    "RootTable",
    "coroot_slice",
    "count_parabolic_completions",
    "enumerate_roots",
    "pairing",
    "PoincareSeries",
    "WeylElement",
    "WeylTable",
    "build_tables",
    "enumerate_weyl",
    "estimate_radius",
    "minimal_coset_reps",
    "poincare",
    "CorrectionFactor",
    "FormalSeries",
    "MacdonaldCheck",
    "WeylSumResult",
    "correction_factor",
    "delta_ratio",
    "macdonald_identity_check",
    "series_inv",
    "series_mul",
    "twisted_action",
    "weyl_sum",
    "AtlasOutcome",
    "ConvergenceReport",
    "EvalOutcome",
    "Evaluator",
    "FacetDescriptor",
    "FacetStatus",
    "InvarianceResult",
    "SpectralPoint",
    "apply_word",
    "classify",
    "reduce_to_dominant",
    "reflect_pairings",
    "errors",
    "__version__",
]
