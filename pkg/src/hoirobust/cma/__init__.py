"""Cross-domain mixup augmentation: corruption synthesis, patch dropout,
Beta-weighted sample mixing, and augmented-dataset emission."""
from .builder import (
    ORIGINAL_DOMAIN,
    PAIRING_POLICIES,
    BuildSummary,
    build_augmented_dataset,
)
from .corruptions import CORRUPTION_KINDS, CorruptionSpec, corrupt
from .mixing import (
    AugmentedSample,
    MixupConfig,
    Provenance,
    eligible_patches,
    patch_dropout,
    sample_mix,
)

__all__ = [
    "AugmentedSample",
    "BuildSummary",
    "CORRUPTION_KINDS",
    "CorruptionSpec",
    "MixupConfig",
    "ORIGINAL_DOMAIN",
    "PAIRING_POLICIES",
    "Provenance",
    "build_augmented_dataset",
    "corrupt",
    "eligible_patches",
    "patch_dropout",
    "sample_mix",
]
