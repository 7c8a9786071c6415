"""Atmospheric light estimation.

Two strategies:

* dark channel prior: the dark channel is the minimum over a square
  patch of the per-pixel channel minimum. Haze-free regions have a dark
  channel near zero, so the brightest dark-channel pixels mark the
  haziest (or inherently brightest) areas; the airlight is the mean
  source color over the top fraction of them.
* far pixels: with a depth map available, average the source color over
  the farthest fraction of pixels (typically sky).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from .depthio import MetricDepth
from .fogmodel import AtmosphericLight
from .rasters import RasterImage

DEFAULT_PATCH_SIZE = 10
DEFAULT_TOP_FRACTION = 0.10
DEFAULT_FAR_FRACTION = 0.05


@dataclass(frozen=True)
class PatchSpec:
    """Square neighborhood for the dark-channel minimum, in pixels."""

    size: int = DEFAULT_PATCH_SIZE

    def __post_init__(self) -> None:
        if not isinstance(self.size, int) or self.size < 1:
            raise ValueError(f"patch size must be a positive integer, got {self.size}")


@dataclass(frozen=True)
class DarkChannelMap:
    """Patch-minimum of the per-pixel channel minimum; values in [0, 1]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 2 or v.size == 0:
            raise ValueError("dark channel must be a non-empty 2-D array")
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("dark channel values must lie in [0, 1]")


def dark_channel(image: RasterImage, patch: PatchSpec | None = None) -> DarkChannelMap:
    """Minimum over a square patch of the per-pixel minimum across channels.

    For even patch sizes the window around pixel p spans offsets
    [-size//2, size//2 - 1] in each axis (e.g. 10 px covers -5..+4),
    clamped at the image border.
    """
    patch = patch or PatchSpec()
    channel_min = image.values.min(axis=2)
    # minimum_filter with mode="nearest" replicates edge pixels, which is
    # exactly a border-clamped sliding window minimum.
    dark = minimum_filter(channel_min, size=patch.size, mode="nearest")
    return DarkChannelMap(dark)


def _mean_color_at_top(
    image: RasterImage, ranking: np.ndarray, fraction: float, what: str
) -> AtmosphericLight:
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"{what} must lie in (0, 1], got {fraction}")
    n_pixels = ranking.size
    n_top = math.ceil(fraction * n_pixels)
    # Stable sort on the negated values: descending order with row-major
    # position breaking ties, so the selection is deterministic.
    order = np.argsort(-ranking.ravel(), kind="stable")[:n_top]
    flat = image.values.reshape(-1, 3)
    color = flat[order].mean(axis=0)
    return AtmosphericLight(tuple(color))


def estimate_light_dcp(
    image: RasterImage,
    patch: PatchSpec | None = None,
    top_fraction: float = DEFAULT_TOP_FRACTION,
) -> AtmosphericLight:
    """Airlight as the mean source color over the brightest dark-channel pixels."""
    dark = dark_channel(image, patch)
    return _mean_color_at_top(image, dark.values, top_fraction, "top_fraction")


def estimate_light_sky(
    image: RasterImage,
    depth: MetricDepth,
    far_fraction: float = DEFAULT_FAR_FRACTION,
) -> AtmosphericLight:
    """Airlight as the mean source color over the farthest pixels."""
    if image.shape != depth.shape:
        raise ValueError(
            f"image {image.shape} and depth {depth.shape} dimensions differ"
        )
    return _mean_color_at_top(image, depth.values, far_fraction, "far_fraction")
