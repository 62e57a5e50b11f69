"""Prototype-based memory network for multi-label scene recognition over
feature vectors.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._pmnet import (  # noqa: F401
    Combine,
    ClusterResult,
    EmbeddingLoss,
    EpochRecord,
    ExamplePR,
    GradCheckConfig,
    GradCheckGroup,
    GradCheckReport,
    LabelMergeMap,
    LabelStats,
    Matrix,
    MetricsReport,
    MultiSceneSample,
    PipelineConfig,
    PmNetModel,
    PmnetError,
    PrototypeMethod,
    RetrievalMode,
    SingleSceneSample,
    SynthConfig,
    SynthData,
    TrainSchedule,
    TwoPhaseReport,
    agglomerative,
    compute_prototype,
    derive_scene_names,
    evaluate_model,
    example_prf,
    f_beta,
    kmeans,
    load_checkpoint,
    matmul,
    run_gradcheck,
    run_two_phase,
    save_checkpoint,
    sigmoid,
    softmax_row,
    synth_generate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
