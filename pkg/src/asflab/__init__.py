"""asf-lab: a numerical laboratory for Gabor-type frame pairs on finite
cyclic models, classifying parameter tuples by p-norm operator-bound
estimation."""

__version__ = "0.1.0"

from .errors import (
    DenseCapExceededError,
    ExponentDomainError,
    IncommensurateParameters,
    ModelMismatchError,
    PainlessConditionError,
    SpecHashMismatchError,
    SweepSpecError,
    ZeroVectorError,
)
from .frameop import (
    DENSE_CAP,
    FramePair,
    analysis_apply,
    analysis_matrix,
    assemble_frame_matrix,
    frame_operator_apply,
    pairing,
    synthesis_apply,
    synthesis_matrix,
)
from .model import (
    CyclicModel,
    FrameBounds,
    GaborTriple,
    GridVector,
    LebesgueExponent,
    build_cyclic_model,
    conjugate_exponent,
    sample_indicator_window,
)
from .operators import GaborFamily, gabor_family, modulate, translate
from .pnorms import (
    NormEstimate,
    OpnormOptions,
    dual_vector,
    exact_p2_extremes,
    inverse_opnorm_estimate,
    opnorm_estimate,
    opnorm_estimate_matrix,
    vector_pnorm,
)
from .sweep import (
    ResultRow,
    ResultTable,
    SweepSpec,
    emit_heatmap,
    load_sweep_spec,
    parse_result_table,
    render_heatmap,
    resume_sweep,
    run_sweep,
    sweep_spec_from_dict,
    table_to_csv,
)
from .verdict import (
    ASF,
    NOT_ASF,
    UNDECIDED,
    ScaleStudy,
    Tolerances,
    Verdict,
    asf_verdict,
    canonical_json,
    indicator_pair,
    painless_oracle,
    scale_study,
)
