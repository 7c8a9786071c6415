"""Procedural turbulence for heterogeneous fog density.

A seeded multi-octave gradient-noise texture modulates the extinction
per pixel:

    T(x) = exp(-beta * tau(x) * D(x))
    tau(x) = sum_{n=1..N} P_n(x) / 2^n

where P_n is gradient noise sampled at a lattice density doubling per
octave. The summed noise is min-max normalized and affinely mapped into
[TAU_FLOOR, brightness], so fog never fully vanishes and never exceeds
the homogeneous density. One texture is generated per sequence and
shared by all frames, giving the fog a static spatial structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .depthio import MetricDepth
from .fogmodel import Attenuation, TransmissionMap

TAU_FLOOR = 0.2
DEFAULT_OCTAVES = 5
DEFAULT_BRIGHTNESS = 0.8
DEFAULT_BASE_CELLS = 4


@dataclass(frozen=True)
class NoiseField:
    """Single-octave gradient noise; values in [-1, 1], zero at lattice corners."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 2 or v.size == 0:
            raise ValueError("noise field must be a non-empty 2-D array")
        if v.min() < -1.0 or v.max() > 1.0:
            raise ValueError("noise values must lie in [-1, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class TurbulenceMap:
    """Per-pixel density multiplier in (0, 1]."""

    values: np.ndarray
    octaves: int
    brightness: float

    def __post_init__(self) -> None:
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 2 or v.size == 0:
            raise ValueError("turbulence must be a non-empty 2-D array")
        if v.min() <= 0.0 or v.max() > 1.0:
            raise ValueError("turbulence values must lie in (0, 1]")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _fade(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep 6t^5 - 15t^4 + 10t^3; zero slope at both ends."""
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def perlin(width: int, height: int, cells: int, seed: int) -> NoiseField:
    """Gradient noise sampled on a width x height pixel grid.

    The lattice has ``cells`` x ``cells`` square cells regardless of the
    pixel dimensions, so the pattern is a function of normalized image
    coordinates. Gradients are seeded unit vectors; pixels that land
    exactly on a lattice corner evaluate to exactly zero.
    """
    if width < 1 or height < 1:
        raise ValueError(f"grid must be at least 1x1, got {width}x{height}")
    if cells < 1:
        raise ValueError(f"lattice needs at least one cell, got {cells}")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=(cells + 1, cells + 1))
    grad_x = np.cos(angles)
    grad_y = np.sin(angles)

    # Multiply before dividing so pixels aligned with a lattice corner
    # produce exact integer coordinates.
    u = (np.arange(width, dtype=np.float64) * cells) / width
    v = (np.arange(height, dtype=np.float64) * cells) / height
    iu = np.minimum(u.astype(np.int64), cells - 1)
    iv = np.minimum(v.astype(np.int64), cells - 1)
    fu = (u - iu)[None, :]
    fv = (v - iv)[:, None]

    col = iu[None, :]
    row = iv[:, None]
    n00 = grad_x[row, col] * fu + grad_y[row, col] * fv
    n10 = grad_x[row, col + 1] * (fu - 1.0) + grad_y[row, col + 1] * fv
    n01 = grad_x[row + 1, col] * fu + grad_y[row + 1, col] * (fv - 1.0)
    n11 = grad_x[row + 1, col + 1] * (fu - 1.0) + grad_y[row + 1, col + 1] * (fv - 1.0)

    su = _fade(fu)
    sv = _fade(fv)
    nx0 = n00 + su * (n10 - n00)
    nx1 = n01 + su * (n11 - n01)
    values = nx0 + sv * (nx1 - nx0)
    return NoiseField(values)


def turbulence_texture(
    width: int,
    height: int,
    octaves: int = DEFAULT_OCTAVES,
    seed: int = 0,
    brightness: float = DEFAULT_BRIGHTNESS,
    base_cells: int = DEFAULT_BASE_CELLS,
) -> TurbulenceMap:
    """Multi-octave turbulence mapped into [TAU_FLOOR, brightness].

    Octave n (1-based) contributes gradient noise at base_cells * 2^(n-1)
    lattice cells with weight 1/2^n and seed offset n, so the texture is
    fully determined by (dimensions, octaves, seed, base_cells).
    """
    if octaves < 1:
        raise ValueError(f"octaves must be >= 1, got {octaves}")
    if not (0.0 < brightness <= 1.0):
        raise ValueError(f"brightness must lie in (0, 1], got {brightness}")
    if base_cells < 1:
        raise ValueError(f"base_cells must be >= 1, got {base_cells}")
    raw = np.zeros((height, width), dtype=np.float64)
    for n in range(1, octaves + 1):
        octave = perlin(width, height, base_cells * 2 ** (n - 1), seed + n)
        raw += octave.values / 2.0**n
    lo = float(raw.min())
    hi = float(raw.max())
    # A gradient-noise sum over a multi-cell lattice is never constant.
    assert hi > lo, "turbulence noise collapsed to a constant"
    norm = (raw - lo) / (hi - lo)
    tau = TAU_FLOOR + (brightness - TAU_FLOOR) * norm
    return TurbulenceMap(tau, octaves=octaves, brightness=brightness)


def heterogeneous_transmission(
    depth: MetricDepth, tau: TurbulenceMap, attenuation: Attenuation
) -> TransmissionMap:
    """Transmission with per-pixel density modulation: exp(-beta*tau*D)."""
    if depth.shape != tau.shape:
        raise ValueError(
            f"depth {depth.shape} and turbulence {tau.shape} dimensions differ"
        )
    return TransmissionMap(np.exp(-attenuation.beta * tau.values * depth.values))
