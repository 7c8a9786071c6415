"""Homogeneous fog formation on a single image.

The scattering model composites a clear image against a global airlight:

    I(x) = I0(x) * T(x) + L * (1 - T(x))
    T(x) = exp(-beta * D(x))

where D is per-pixel metric depth and beta the extinction coefficient.
beta is tied to meteorological visibility V through the 5% contrast
threshold: beta = -ln(0.05) / V, so an object exactly V meters away
retains 5% of its contrast. Abstract severity levels 1..4 instead pick
beta from a geometric ladder meant for normalized (unitless) depth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .depthio import MetricDepth
from .rasters import RasterImage

CONTRAST_THRESHOLD = 0.05
EXTINCTION_NUMERATOR = -math.log(CONTRAST_THRESHOLD)

# Severity ladder for normalized depth in (0, 1]: each step doubles the
# optical thickness of the far plane.
DEFAULT_LEVEL_BETAS: Mapping[int, float] = MappingProxyType(
    {1: 1.0, 2: 2.0, 3: 4.0, 4: 8.0}
)


@dataclass(frozen=True)
class Attenuation:
    """Extinction coefficient beta (1/m for metric depth, unitless otherwise)."""

    beta: float
    visibility: float | None = None

    def __post_init__(self) -> None:
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ValueError(f"attenuation must be positive, got beta={self.beta}")


@dataclass(frozen=True)
class TransmissionMap:
    """Per-pixel fraction of surface radiance surviving the medium, in [0, 1].

    Physical transmission exp(-beta*D) is strictly positive; the zero
    boundary is admitted so the fully opaque limit can be composited
    directly (it reproduces the airlight exactly).
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 2 or v.size == 0:
            raise ValueError(
                f"transmission must be a non-empty 2-D array, "
                f"got shape {getattr(v, 'shape', None)}"
            )
        if v.dtype != np.float64:
            object.__setattr__(self, "values", v.astype(np.float64))
            v = self.values
        if not np.isfinite(v).all():
            raise ValueError("transmission contains non-finite values")
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("transmission values must lie in [0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class AtmosphericLight:
    """Global airlight color, RGB in [0, 1]."""

    color: tuple[float, float, float]

    def __post_init__(self) -> None:
        color = tuple(float(c) for c in self.color)
        if len(color) != 3:
            raise ValueError(f"airlight needs exactly 3 channels, got {len(color)}")
        if any(not (0.0 <= c <= 1.0) for c in color):
            raise ValueError(f"airlight channels must lie in [0, 1], got {color}")
        object.__setattr__(self, "color", color)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.color, dtype=np.float64)


def beta_from_visibility(visibility: float) -> Attenuation:
    """Extinction coefficient for a meteorological visibility in meters."""
    if not (visibility > 0.0 and math.isfinite(visibility)):
        raise ValueError(f"visibility must be positive, got {visibility}")
    return Attenuation(beta=EXTINCTION_NUMERATOR / visibility, visibility=visibility)


def beta_from_level(
    level: int, level_betas: Mapping[int, float] | None = None
) -> Attenuation:
    """Extinction coefficient for an abstract severity level.

    Levels index a configurable ladder of beta values intended for
    normalized depth; the default doubles beta per level: 1, 2, 4, 8.
    """
    ladder = DEFAULT_LEVEL_BETAS if level_betas is None else level_betas
    if level not in ladder:
        raise ValueError(
            f"unknown severity level {level}; available: {sorted(ladder)}"
        )
    return Attenuation(beta=float(ladder[level]))


def transmission(depth: MetricDepth, attenuation: Attenuation) -> TransmissionMap:
    """Per-pixel transmission exp(-beta * D)."""
    return TransmissionMap(np.exp(-attenuation.beta * depth.values))


def composite(
    clear: RasterImage, trans: TransmissionMap, light: AtmosphericLight
) -> RasterImage:
    """Blend a clear image with airlight according to per-pixel transmission.

    At T=1 the clear image passes through unchanged; at T=0 the output is
    the airlight everywhere. Every output pixel lies on the segment
    between the source pixel and the airlight color.
    """
    if clear.shape != trans.shape:
        raise ValueError(
            f"image {clear.shape} and transmission {trans.shape} dimensions differ"
        )
    t = trans.values[:, :, None]
    out = clear.values * t + light.as_array() * (1.0 - t)
    # Exact convex combination of in-range values; clip only guards
    # against float round-off at the boundaries.
    np.clip(out, 0.0, 1.0, out=out)
    return RasterImage(out)
