"""Natural distribution-shift toolbox: 11 corruption kinds at 5
severities, plus a dataset batch converter."""

from .core import (
    BLUR_LENGTH,
    CORRUPTION_KINDS,
    FOG_HAZE,
    GAUSSIAN_SIGMA,
    IMPULSE_FRACTION,
    ROTATION_DEG,
    SCALE_ZOOM,
    SHEAR_FACTOR,
    STREAK_COUNT,
    SUNLIGHT_PEAK,
    UNIFORM_HALF_WIDTH,
    CorruptionKind,
    corrupt,
    validate_image,
)
from .dataset import (
    MANIFEST_COLUMNS,
    corrupt_dataset,
    derived_seed,
    load_image,
    read_input_manifest,
    save_image,
)

__all__ = [
    "BLUR_LENGTH",
    "CORRUPTION_KINDS",
    "CorruptionKind",
    "FOG_HAZE",
    "GAUSSIAN_SIGMA",
    "IMPULSE_FRACTION",
    "MANIFEST_COLUMNS",
    "ROTATION_DEG",
    "SCALE_ZOOM",
    "SHEAR_FACTOR",
    "STREAK_COUNT",
    "SUNLIGHT_PEAK",
    "UNIFORM_HALF_WIDTH",
    "corrupt",
    "corrupt_dataset",
    "derived_seed",
    "load_image",
    "read_input_manifest",
    "save_image",
    "validate_image",
]
