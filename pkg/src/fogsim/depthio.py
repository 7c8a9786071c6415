"""Depth map I/O and conversion to per-pixel metric depth.

Monocular depth estimators emit relative inverse depth: unitless values
where larger means closer to the camera. Rendering needs metric distance
per pixel. With a known scene range [d_min, d_max] the inverse-depth map
is calibrated through

    D(x) = 1 / (s * d(x) + t),  s = 1/d_min - 1/d_max,  t = 1/d_max

so the largest input value maps to d_min and the smallest to d_max. When
no range is known, a normalized pseudo-depth in (0, 1] is derived instead
by min-max inversion of the raw map.

Supported file formats: PFM (single channel, scale line selects byte
order, rows stored bottom-up) and 16-bit grayscale PNG (values scaled by
1/65535).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DepthFileError

PSEUDO_DEPTH_FLOOR = 1e-6
METRIC_UNIT = "m"
NORMALIZED_UNIT = "normalized"


def _check_plane(values: np.ndarray, what: str) -> np.ndarray:
    if not isinstance(values, np.ndarray) or values.ndim != 2:
        raise ValueError(
            f"{what} must be a 2-D array, got shape {getattr(values, 'shape', None)}"
        )
    if values.size == 0:
        raise ValueError(f"{what} must contain at least one pixel")
    if values.dtype != np.float64:
        values = values.astype(np.float64)
    n_bad = int(np.count_nonzero(~np.isfinite(values)))
    if n_bad:
        raise ValueError(f"{what} contains {n_bad} non-finite pixel(s)")
    return values


@dataclass(frozen=True)
class RelativeInverseDepth:
    """Unitless inverse-depth raster; larger values are closer to the camera."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _check_plane(self.values, "inverse-depth map")
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class MetricDepth:
    """Per-pixel distance from the camera; strictly positive everywhere.

    ``unit`` is "m" for calibrated maps and "normalized" for pseudo-depth,
    where values live in (0, 1].
    """

    values: np.ndarray
    unit: str = METRIC_UNIT

    def __post_init__(self) -> None:
        values = _check_plane(self.values, "depth map")
        n_bad = int(np.count_nonzero(values <= 0.0))
        if n_bad:
            raise ValueError(f"depth map contains {n_bad} non-positive pixel(s)")
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class SceneReference:
    """Known nearest and farthest scene distance, in meters."""

    d_min: float
    d_max: float

    def __post_init__(self) -> None:
        if not (0.0 < self.d_min < self.d_max):
            raise ValueError(
                f"scene reference requires 0 < d_min < d_max, "
                f"got d_min={self.d_min}, d_max={self.d_max}"
            )


@dataclass(frozen=True)
class DepthCalibration:
    """Affine map applied to inverse depth before inversion: 1/(scale*d + shift)."""

    scale: float
    shift: float

    def __post_init__(self) -> None:
        if self.scale <= 0.0 or self.shift <= 0.0:
            raise ValueError(
                f"calibration requires positive scale and shift, "
                f"got scale={self.scale}, shift={self.shift}"
            )


def calibrate(reference: SceneReference) -> DepthCalibration:
    """Solve the affine coefficients mapping inverse depth onto [d_min, d_max].

    Unit inverse depth lands on d_min, zero lands on d_max.
    """
    scale = 1.0 / reference.d_min - 1.0 / reference.d_max
    shift = 1.0 / reference.d_max
    return DepthCalibration(scale=scale, shift=shift)


def to_metric(depth: RelativeInverseDepth, cal: DepthCalibration) -> MetricDepth:
    """Convert relative inverse depth to metric distance via 1/(s*d + t)."""
    denom = cal.scale * depth.values + cal.shift
    n_bad = int(np.count_nonzero(denom <= 0.0))
    if n_bad:
        raise ValueError(
            f"calibration produced {n_bad} non-positive inverse-depth pixel(s); "
            f"input values are too negative for scale={cal.scale}, shift={cal.shift}"
        )
    return MetricDepth(1.0 / denom, unit=METRIC_UNIT)


def to_pseudo_depth(depth: RelativeInverseDepth) -> MetricDepth:
    """Derive normalized depth in (0, 1] without a metric reference.

    The raw map is min-max normalized and inverted so the nearest pixel
    approaches 0 and the farthest reaches 1, then floored at a small
    epsilon to keep every value strictly positive. A constant input map
    carries no ordering information; it maps to a uniform 0.5 with a
    warning.
    """
    v = depth.values
    lo = float(v.min())
    hi = float(v.max())
    if hi == lo:
        warnings.warn(
            "constant inverse-depth map has no depth ordering; "
            "using uniform pseudo-depth 0.5",
            RuntimeWarning,
            stacklevel=2,
        )
        return MetricDepth(np.full_like(v, 0.5), unit=NORMALIZED_UNIT)
    pseudo = 1.0 - (v - lo) / (hi - lo)
    np.maximum(pseudo, PSEUDO_DEPTH_FLOOR, out=pseudo)
    return MetricDepth(pseudo, unit=NORMALIZED_UNIT)


def load_depth(path: str | Path, fmt: str | None = None) -> RelativeInverseDepth:
    """Read a depth file as relative inverse depth.

    ``fmt`` is "pfm" or "png16"; when omitted it is inferred from the file
    extension. Non-finite pixels and multi-channel content are rejected.
    """
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower()
        if suffix == ".pfm":
            fmt = "pfm"
        elif suffix == ".png":
            fmt = "png16"
        else:
            raise DepthFileError(
                f"cannot infer depth format from extension {suffix!r}: {path}"
            )
    if not path.is_file():
        raise DepthFileError(f"depth file not found: {path}")
    if fmt == "pfm":
        values = _read_pfm(path)
    elif fmt == "png16":
        values = _read_png16(path)
    else:
        raise DepthFileError(f"unsupported depth format {fmt!r}")
    n_bad = int(np.count_nonzero(~np.isfinite(values)))
    if n_bad:
        raise DepthFileError(f"{path}: {n_bad} non-finite depth value(s)")
    return RelativeInverseDepth(values)


def _read_pfm(path: Path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.readline().strip()
        if header == b"PF":
            raise DepthFileError(
                f"{path}: 3-channel PFM is not a depth map (expected 'Pf')"
            )
        if header != b"Pf":
            raise DepthFileError(f"{path}: not a PFM file (header {header!r})")
        dims = fh.readline().split()
        if len(dims) != 2:
            raise DepthFileError(f"{path}: malformed PFM dimensions line")
        try:
            width, height = int(dims[0]), int(dims[1])
            scale = float(fh.readline().strip())
        except ValueError as exc:
            raise DepthFileError(f"{path}: malformed PFM header: {exc}") from exc
        if width < 1 or height < 1:
            raise DepthFileError(f"{path}: invalid PFM dimensions {width}x{height}")
        if scale == 0.0:
            raise DepthFileError(f"{path}: PFM scale must be non-zero")
        dtype = "<f4" if scale < 0.0 else ">f4"
        n_bytes = width * height * 4
        data = fh.read(n_bytes)
        if len(data) < n_bytes:
            raise DepthFileError(
                f"{path}: truncated PFM payload "
                f"({len(data)} of {n_bytes} bytes)"
            )
    plane = np.frombuffer(data, dtype=dtype).reshape(height, width)
    # PFM stores rows bottom-up; flip to image order (top row first).
    return np.flipud(plane).astype(np.float64)


def write_pfm(path: str | Path, values: np.ndarray) -> None:
    """Write a 2-D array as a little-endian single-channel PFM file."""
    values = _check_plane(np.asarray(values), "PFM payload")
    height, width = values.shape
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{width} {height}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(np.flipud(values).astype("<f4").tobytes())


def _read_png16(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode not in ("I;16", "I;16B", "I"):
            raise DepthFileError(
                f"{path}: expected 16-bit grayscale PNG, got mode {im.mode!r}"
            )
        arr = np.asarray(im, dtype=np.float64)
    return arr / 65535.0


def write_png16(path: str | Path, values: np.ndarray) -> None:
    """Write a [0, 1] array as a 16-bit grayscale PNG."""
    values = _check_plane(np.asarray(values), "PNG16 payload")
    if values.min() < 0.0 or values.max() > 1.0:
        raise ValueError("PNG16 payload values must lie in [0, 1]")
    u16 = np.rint(values * 65535.0).astype(np.uint16)
    Image.fromarray(u16).save(path)
