"""Request and response models for the HTTP service."""
from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import FogConfig
from ..depthio import SceneReference
from ..errors import ConfigError
from ..harness import DegradationModel, SyntheticScene


class HealthResponse(BaseModel):
    status: str
    version: str


class AttenuationRequest(BaseModel):
    """Exactly one of visibility (meters) or level (severity 1..4)."""

    visibility: float | None = None
    level: int | None = None


class AttenuationResponse(BaseModel):
    beta: float
    visibility: float | None = None
    level: int | None = None


class CalibrationRequest(BaseModel):
    d_min: float
    d_max: float


class CalibrationResponse(BaseModel):
    scale: float
    shift: float


class FogParams(BaseModel):
    """Wire form of a fog rendering configuration."""

    mode: str = "homogeneous"
    level: int | None = None
    visibility: float | None = None
    seed: int = 0
    light: str = "dcp"
    light_color: tuple[float, float, float] | None = None
    d_min: float | None = None
    d_max: float | None = None
    patch_size: int = 10
    top_fraction: float = 0.10
    far_fraction: float = 0.05
    octaves: int = 5
    brightness: float = 0.8
    base_cells: int = 4
    lossless: bool = False

    def to_config(self) -> FogConfig:
        if (self.d_min is None) != (self.d_max is None):
            raise ConfigError("d_min and d_max must be given together")
        reference = (
            SceneReference(self.d_min, self.d_max)
            if self.d_min is not None and self.d_max is not None
            else None
        )
        return FogConfig(
            mode=self.mode,
            level=self.level,
            visibility=self.visibility,
            seed=self.seed,
            light=self.light,
            light_color=self.light_color,
            reference=reference,
            patch_size=self.patch_size,
            top_fraction=self.top_fraction,
            far_fraction=self.far_fraction,
            octaves=self.octaves,
            brightness=self.brightness,
            base_cells=self.base_cells,
            lossless=self.lossless,
        )


class RenderRequest(BaseModel):
    input_dir: str
    output_dir: str
    depth_dir: str | None = None
    threads: int | None = Field(default=None, ge=1)
    config: FogParams


class SequenceOutcome(BaseModel):
    name: str
    status: str
    frames: int | None = None
    manifest: str | None = None
    error: str | None = None


class RenderResponse(BaseModel):
    outcomes: list[SequenceOutcome]
    n_rendered: int
    n_failed: int


class EvaluateRequest(BaseModel):
    gt_path: str
    results_path: str
    iou_threshold: float = Field(default=0.5, gt=0.0, le=1.0)


class EvaluateResponse(BaseModel):
    hota: float
    mota: float
    motp: float
    idf1: float
    id_switches: int
    false_positives: int
    false_negatives: int
    gt_count: int


class SceneParams(BaseModel):
    """Wire form of a synthetic scene description."""

    n_objects: int = 5
    n_frames: int = 100
    image_width: int = 256
    image_height: int = 256
    box_size: int = 24
    motion: list[tuple[float, float]] | None = None
    depth_profile: list[float] | None = None
    seed: int = 0

    def to_scene(self) -> SyntheticScene:
        return SyntheticScene(
            n_objects=self.n_objects,
            n_frames=self.n_frames,
            image_size=(self.image_width, self.image_height),
            box_size=self.box_size,
            motion=tuple(tuple(v) for v in self.motion)
            if self.motion is not None
            else None,
            depth_profile=tuple(self.depth_profile)
            if self.depth_profile is not None
            else None,
            seed=self.seed,
        )


class DegradationParams(BaseModel):
    slope: float = 1.0
    intercept: float = 0.0
    noise_sigma: float = Field(default=0.0, ge=0.0)
    seed: int = 0

    def to_model(self) -> DegradationModel:
        return DegradationModel(
            slope=self.slope,
            intercept=self.intercept,
            noise_sigma=self.noise_sigma,
            seed=self.seed,
        )


class SweepRequest(BaseModel):
    scene: SceneParams = SceneParams()
    levels: list[int] = [1, 2, 3, 4]
    mode: str = "homogeneous"
    seed: int = 0
    degradation: DegradationParams = DegradationParams()
    iou_threshold: float = Field(default=0.5, gt=0.0, le=1.0)


class SweepRowModel(BaseModel):
    label: str
    hota: float
    mota: float
    motp: float
    idf1: float
    id_switches: int


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]
    csv: str
    markdown: str
