"""Physics-based fog rendering for tracking datasets, with MOT evaluation.

The package covers the full loop of a fog robustness study: load per-frame
depth, synthesize homogeneous or turbulence-modulated fog over image
sequences, score tracker output with the standard MOT metrics and sweep
synthetic scenes across fog severities. A FastAPI service
(``fogsim.service``) and a ``fog`` CLI wrap the same core API.
"""

__version__ = "0.1.0"

from .atmolight import (
    DarkChannelMap,
    PatchSpec,
    dark_channel,
    estimate_light_dcp,
    estimate_light_sky,
)
from .config import (
    HETEROGENEOUS,
    HOMOGENEOUS,
    FogConfig,
    default_level_configs,
    normalize_mode,
)
from .depthio import (
    DepthCalibration,
    MetricDepth,
    RelativeInverseDepth,
    SceneReference,
    calibrate,
    load_depth,
    to_metric,
    to_pseudo_depth,
    write_pfm,
    write_png16,
)
from .errors import ConfigError, DatasetError, DepthFileError, FogsimError
from .fogmodel import (
    CONTRAST_THRESHOLD,
    DEFAULT_LEVEL_BETAS,
    AtmosphericLight,
    Attenuation,
    TransmissionMap,
    beta_from_level,
    beta_from_visibility,
    composite,
    transmission,
)
from .harness import (
    DegradationModel,
    SweepReport,
    SweepRow,
    SyntheticScene,
    degrade_detections,
    generate_scene,
    reference_tracker,
    sweep,
)
from .metrics import (
    Box,
    ClearMotResult,
    MetricReport,
    TrackRecord,
    TrackSet,
    clear_mot,
    evaluate,
    hota,
    idf1,
    iou,
    load_mot_file,
    write_mot_file,
)
from .pipeline import (
    DatasetRenderResult,
    RenderedSequence,
    SequenceDescriptor,
    discover_dataset,
    discover_sequence,
    render_dataset,
    render_sequence,
    sequence_seed,
    thread_count,
)
from .rasters import RasterImage, read_image, write_image
from .turbulence import (
    TAU_FLOOR,
    NoiseField,
    TurbulenceMap,
    heterogeneous_transmission,
    perlin,
    turbulence_texture,
)

__all__ = [
    "__version__",
    "AtmosphericLight",
    "Attenuation",
    "Box",
    "CONTRAST_THRESHOLD",
    "ClearMotResult",
    "ConfigError",
    "DEFAULT_LEVEL_BETAS",
    "DarkChannelMap",
    "DatasetError",
    "DatasetRenderResult",
    "DegradationModel",
    "DepthCalibration",
    "DepthFileError",
    "FogConfig",
    "FogsimError",
    "HETEROGENEOUS",
    "HOMOGENEOUS",
    "MetricDepth",
    "MetricReport",
    "NoiseField",
    "PatchSpec",
    "RasterImage",
    "RelativeInverseDepth",
    "RenderedSequence",
    "SceneReference",
    "SequenceDescriptor",
    "SweepReport",
    "SweepRow",
    "SyntheticScene",
    "TAU_FLOOR",
    "TrackRecord",
    "TrackSet",
    "TransmissionMap",
    "TurbulenceMap",
    "beta_from_level",
    "beta_from_visibility",
    "calibrate",
    "clear_mot",
    "composite",
    "dark_channel",
    "default_level_configs",
    "degrade_detections",
    "discover_dataset",
    "discover_sequence",
    "estimate_light_dcp",
    "estimate_light_sky",
    "evaluate",
    "generate_scene",
    "heterogeneous_transmission",
    "hota",
    "idf1",
    "iou",
    "load_depth",
    "load_mot_file",
    "normalize_mode",
    "perlin",
    "read_image",
    "reference_tracker",
    "render_dataset",
    "render_sequence",
    "sequence_seed",
    "sweep",
    "thread_count",
    "to_metric",
    "to_pseudo_depth",
    "transmission",
    "turbulence_texture",
    "write_image",
    "write_mot_file",
    "write_pfm",
    "write_png16",
]
