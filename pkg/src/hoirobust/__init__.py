"""Distribution-shift robustness toolkit for human-object-interaction detection.

The package covers the desk-scale side of benchmarking HOI detectors under
domain shift: triplet mAP evaluation, robust-ratio metrics over a method
fleet, false-positive error attribution, cross-domain mixup augmentation,
benchmark sample filtering, and a deterministic token-fusion kernel with a
mock foundation model.  `hoirobust --help` lists the command-line surface.
"""
from .benchfilter import (
    FilterDecision,
    FilterScores,
    FilterThresholds,
    ObjectDetection,
    apply_filters,
    filtered_manifest,
    match_f1,
    object_consistency_filter,
    small_object_filter,
    vl_alignment_filter,
)
from .cma import (
    CORRUPTION_KINDS,
    AugmentedSample,
    CorruptionSpec,
    MixupConfig,
    Provenance,
    build_augmented_dataset,
    corrupt,
    eligible_patches,
    patch_dropout,
    sample_mix,
)
from .core import (
    BoundingBox,
    ConfigError,
    DataError,
    DatasetIndex,
    DetectionInstance,
    DetectionSet,
    DomainManifest,
    GroundTruthInstance,
    HoiCategoryTable,
    ImageRecord,
    InvariantError,
    ManifestEntry,
    ParseError,
    SchemaError,
    load_dataset,
    load_detections,
    load_manifest,
    validate_manifest,
    write_json,
)
from .errors import (
    ERROR_TYPES,
    ErrorBreakdown,
    ErrorType,
    attribute_error,
    breakdown,
    compare_domains,
)
from .evaluation import (
    SETTINGS,
    EvalReport,
    average_precision,
    evaluate,
    iou,
    match_image,
)
from .f4m import (
    F4MConfig,
    GridError,
    MaskError,
    VfmOutput,
    cell_mask,
    decoder_self_attention_with_image_queries,
    decoder_stack,
    f4m_check,
    image_queries,
    masked_attention,
    mock_vfm_forward,
    regional_dropout,
    regional_fuse,
    run_query_pipeline,
)
from .robustness import (
    FleetReport,
    MethodRobustness,
    UndefinedRatioError,
    comprehensive_map,
    fleet_report,
    robust_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedSample",
    "BoundingBox",
    "CORRUPTION_KINDS",
    "ConfigError",
    "CorruptionSpec",
    "DataError",
    "DatasetIndex",
    "DetectionInstance",
    "DetectionSet",
    "DomainManifest",
    "ERROR_TYPES",
    "ErrorBreakdown",
    "ErrorType",
    "EvalReport",
    "F4MConfig",
    "FilterDecision",
    "FilterScores",
    "FilterThresholds",
    "FleetReport",
    "GridError",
    "GroundTruthInstance",
    "HoiCategoryTable",
    "ImageRecord",
    "InvariantError",
    "ManifestEntry",
    "MaskError",
    "MethodRobustness",
    "MixupConfig",
    "ObjectDetection",
    "ParseError",
    "Provenance",
    "SETTINGS",
    "SchemaError",
    "UndefinedRatioError",
    "VfmOutput",
    "apply_filters",
    "attribute_error",
    "average_precision",
    "breakdown",
    "build_augmented_dataset",
    "cell_mask",
    "compare_domains",
    "comprehensive_map",
    "corrupt",
    "decoder_self_attention_with_image_queries",
    "decoder_stack",
    "eligible_patches",
    "evaluate",
    "f4m_check",
    "filtered_manifest",
    "fleet_report",
    "image_queries",
    "iou",
    "load_dataset",
    "load_detections",
    "load_manifest",
    "masked_attention",
    "match_f1",
    "match_image",
    "mock_vfm_forward",
    "object_consistency_filter",
    "patch_dropout",
    "regional_dropout",
    "regional_fuse",
    "robust_ratio",
    "run_query_pipeline",
    "sample_mix",
    "small_object_filter",
    "validate_manifest",
    "vl_alignment_filter",
    "write_json",
]
