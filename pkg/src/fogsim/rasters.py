"""Color raster container and 8-bit image I/O.

All image math in this package runs on float64 arrays with channel values
in [0, 1]. Files are read and written through Pillow; JPEG output uses a
fixed quality so repeated renders of the same content are byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

JPEG_QUALITY = 95


@dataclass(frozen=True)
class RasterImage:
    """H x W x 3 color raster, float64, every channel value in [0, 1]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 3 or v.shape[2] != 3:
            raise ValueError(
                f"expected an H x W x 3 array, got shape {getattr(v, 'shape', None)}"
            )
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("image must contain at least one pixel")
        if v.dtype != np.float64:
            object.__setattr__(self, "values", v.astype(np.float64))
            v = self.values
        if not np.isfinite(v).all():
            raise ValueError("image contains non-finite values")
        if v.min() < 0.0 or v.max() > 1.0:
            raise ValueError("image values must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        """(height, width) of the raster."""
        return self.values.shape[0], self.values.shape[1]


def read_image(path: str | Path) -> RasterImage:
    """Load an 8-bit image file as a [0, 1] float raster."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return RasterImage(arr / 255.0)


def write_image(path: str | Path, image: RasterImage) -> None:
    """Write a raster as an 8-bit image file.

    The format follows the file extension. JPEG is written at quality 95;
    PNG is lossless, so a [0, 1] raster built from 8-bit content survives a
    PNG round trip bit-exactly.
    """
    path = Path(path)
    u8 = np.rint(image.values * 255.0).astype(np.uint8)
    pil = Image.fromarray(u8)
    if path.suffix.lower() in (".jpg", ".jpeg"):
        pil.save(path, quality=JPEG_QUALITY)
    else:
        pil.save(path)
