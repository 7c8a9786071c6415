"""Fog rendering configuration shared by the pipeline, harness, CLI and service."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .atmolight import (
    DEFAULT_FAR_FRACTION,
    DEFAULT_PATCH_SIZE,
    DEFAULT_TOP_FRACTION,
)
from .depthio import SceneReference
from .errors import ConfigError
from .fogmodel import Attenuation, beta_from_level, beta_from_visibility
from .turbulence import (
    DEFAULT_BASE_CELLS,
    DEFAULT_BRIGHTNESS,
    DEFAULT_OCTAVES,
)

HOMOGENEOUS = "homogeneous"
HETEROGENEOUS = "heterogeneous"
LIGHT_STRATEGIES = ("dcp", "sky", "fixed")


def normalize_mode(mode: str) -> str:
    """Accept the short and long spelling of the two density modes."""
    lowered = mode.lower()
    if lowered in ("homo", HOMOGENEOUS):
        return HOMOGENEOUS
    if lowered in ("hetero", HETEROGENEOUS):
        return HETEROGENEOUS
    raise ConfigError(f"mode must be 'homo' or 'hetero', got {mode!r}")


@dataclass(frozen=True)
class FogConfig:
    """Full description of one fog rendering run.

    Fog intensity comes from exactly one of ``level`` (abstract severity
    on the beta ladder, meant for normalized depth) or ``visibility``
    (meters, meant for metric depth calibrated via ``reference``).
    ``mode`` selects homogeneous density or turbulence-modulated
    heterogeneous density. ``light`` picks the airlight estimation
    strategy; "fixed" requires an explicit ``light_color``.
    """

    mode: str = HOMOGENEOUS
    level: int | None = None
    visibility: float | None = None
    seed: int = 0
    light: str = "dcp"
    light_color: tuple[float, float, float] | None = None
    reference: SceneReference | None = None
    patch_size: int = DEFAULT_PATCH_SIZE
    top_fraction: float = DEFAULT_TOP_FRACTION
    far_fraction: float = DEFAULT_FAR_FRACTION
    octaves: int = DEFAULT_OCTAVES
    brightness: float = DEFAULT_BRIGHTNESS
    base_cells: int = DEFAULT_BASE_CELLS
    level_betas: Mapping[int, float] | None = None
    lossless: bool = False

    def __post_init__(self) -> None:
        if self.mode not in (HOMOGENEOUS, HETEROGENEOUS):
            raise ConfigError(
                f"mode must be {HOMOGENEOUS!r} or {HETEROGENEOUS!r}, got {self.mode!r}"
            )
        if (self.level is None) == (self.visibility is None):
            raise ConfigError(
                "exactly one of level or visibility must be set, "
                f"got level={self.level}, visibility={self.visibility}"
            )
        if self.light not in LIGHT_STRATEGIES:
            raise ConfigError(
                f"light must be one of {LIGHT_STRATEGIES}, got {self.light!r}"
            )
        if self.light == "fixed" and self.light_color is None:
            raise ConfigError("light='fixed' requires light_color")
        if self.light != "fixed" and self.light_color is not None:
            raise ConfigError("light_color is only valid with light='fixed'")
        # Fail fast on out-of-ladder levels and non-positive visibility.
        try:
            self.attenuation()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.patch_size < 1:
            raise ConfigError(f"patch_size must be >= 1, got {self.patch_size}")
        if not (0.0 < self.top_fraction <= 1.0):
            raise ConfigError(
                f"top_fraction must lie in (0, 1], got {self.top_fraction}"
            )
        if not (0.0 < self.far_fraction <= 1.0):
            raise ConfigError(
                f"far_fraction must lie in (0, 1], got {self.far_fraction}"
            )
        if self.octaves < 1:
            raise ConfigError(f"octaves must be >= 1, got {self.octaves}")
        if not (0.0 < self.brightness <= 1.0):
            raise ConfigError(
                f"brightness must lie in (0, 1], got {self.brightness}"
            )
        if self.base_cells < 1:
            raise ConfigError(f"base_cells must be >= 1, got {self.base_cells}")

    def attenuation(self) -> Attenuation:
        """Extinction coefficient implied by the chosen intensity knob."""
        if self.level is not None:
            ladder = self.level_betas if self.level_betas is not None else None
            return beta_from_level(self.level, ladder)
        assert self.visibility is not None
        return beta_from_visibility(self.visibility)

    @property
    def heterogeneous(self) -> bool:
        return self.mode == HETEROGENEOUS

    def label(self) -> str:
        """Short human-readable tag, used in sweep tables and manifests."""
        if self.level is not None:
            return f"fog-{self.level}"
        return f"fog-v{self.visibility:g}"


def default_level_configs(
    levels: tuple[int, ...] = (1, 2, 3, 4),
    mode: str = HOMOGENEOUS,
    seed: int = 0,
) -> tuple[FogConfig, ...]:
    """One FogConfig per severity level, sharing mode and seed."""
    return tuple(FogConfig(mode=mode, level=lv, seed=seed) for lv in levels)
