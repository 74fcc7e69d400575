"""eigenflow: eigencurve tracing and block-structure analysis for
1-parameter matrix flows.

The pipeline: trace all eigencurves of A(t) over [t0, tf] (ZNN fast path or
re-diagonalization oracle), detect curve crossings and near approaches,
then infer the coarsest uniform block-diagonal split the crossing geometry
allows, refined by user-asserted almost-touch pairs.
"""

from .flows import (
    FlowError,
    MatrixFlow,
    SimilarityMatrix,
    block_join,
    conjugate,
    evaluate,
    gallery,
    hermitize,
    random_orthogonal,
    random_unitary,
    scalar_shift,
)
from .formulas import FormulaCoefficients, best_stable, derive_formula
from .tracker import (
    EigencurveTrace,
    RestartNeeded,
    ZNNConfig,
    oracle_trace,
    static_eigen,
    trace,
    znn_step,
)
from .crossings import (
    CrossingSet,
    NearApproach,
    TouchCandidate,
    build_R1,
    detect_crossings,
    near_approach,
    parse_R1,
    refine_min_gap,
    suggest_touch,
)
from .decomposition import (
    BlockStructure,
    TouchError,
    almost_touch,
    apply_touch,
    block_structure,
    infer_labels,
    min_blocks_oracle,
)
from . import session

__version__ = "0.1.0"

__all__ = [
    "FlowError", "MatrixFlow", "SimilarityMatrix", "block_join", "conjugate",
    "evaluate", "gallery", "hermitize", "random_orthogonal", "random_unitary",
    "scalar_shift",
    "FormulaCoefficients", "best_stable", "derive_formula",
    "EigencurveTrace", "RestartNeeded", "ZNNConfig", "oracle_trace",
    "static_eigen", "trace", "znn_step",
    "CrossingSet", "NearApproach", "TouchCandidate", "build_R1",
    "detect_crossings", "near_approach", "parse_R1", "refine_min_gap",
    "suggest_touch",
    "BlockStructure", "TouchError", "almost_touch", "apply_touch",
    "block_structure", "infer_labels", "min_blocks_oracle",
    "session",
]
