"""Dataset rendering pipeline.

Walks tracking-benchmark sequences (``<seq>/img1/*.jpg`` plus optional
``gt/`` and ``seqinfo.ini``), pairs every frame with its depth map,
renders fog per frame and mirrors the untouched annotation files into
the output, so the result is again a valid dataset directory. Every
render writes a plain-text manifest with the effective parameters and
per-frame content checksums; a repeated run with the same inputs yields
byte-identical outputs and manifests.

Frame work is embarrassingly parallel and runs on a thread pool (NumPy
and Pillow release the GIL for the heavy parts). The FOG_THREADS
environment variable caps the worker count.
"""
from __future__ import annotations

import configparser
import hashlib
import os
import shutil
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .atmolight import PatchSpec, estimate_light_dcp, estimate_light_sky
from .config import FogConfig
from .depthio import (
    DepthCalibration,
    MetricDepth,
    RelativeInverseDepth,
    calibrate,
    load_depth,
    to_metric,
    to_pseudo_depth,
)
from .errors import ConfigError, DatasetError, FogsimError
from .fogmodel import AtmosphericLight, composite, transmission
from .rasters import RasterImage, read_image, write_image
from .turbulence import TurbulenceMap, heterogeneous_transmission, turbulence_texture

IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png")
DEPTH_EXTENSIONS = (".pfm", ".png")
MANIFEST_NAME = "manifest.txt"
SEQINFO_NAME = "seqinfo.ini"
DEFAULT_FRAME_RATE = 30.0


@dataclass(frozen=True)
class SequenceDescriptor:
    """One discovered sequence: where its frames and depth maps live."""

    name: str
    root: Path
    image_dir: Path
    depth_dir: Path
    frames: tuple[str, ...]
    frame_rate: float = DEFAULT_FRAME_RATE
    resolution: tuple[int, int] | None = None

    @property
    def nested_images(self) -> bool:
        """True when frames live in an img1/ subdirectory."""
        return self.image_dir != self.root


@dataclass(frozen=True)
class RenderedSequence:
    """Output location and manifest of one rendered sequence."""

    name: str
    out_dir: Path
    manifest_path: Path
    n_frames: int


@dataclass(frozen=True)
class DatasetRenderResult:
    """Per-sequence outcomes of a dataset render."""

    rendered: tuple[RenderedSequence, ...]
    failures: tuple[tuple[str, str], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def thread_count(requested: int | None = None) -> int:
    """Worker count for frame parallelism, capped by FOG_THREADS."""
    n = requested if requested is not None else min(8, os.cpu_count() or 1)
    cap = os.environ.get("FOG_THREADS")
    if cap is not None:
        try:
            cap_n = int(cap)
        except ValueError as exc:
            raise ConfigError(f"FOG_THREADS must be an integer, got {cap!r}") from exc
        if cap_n < 1:
            raise ConfigError(f"FOG_THREADS must be >= 1, got {cap_n}")
        n = min(n, cap_n)
    return max(1, n)


def _list_frames(image_dir: Path) -> tuple[str, ...]:
    return tuple(
        sorted(
            p.name
            for p in image_dir.iterdir()
            if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
        )
    )


def discover_sequence(
    seq_dir: str | Path, depth_dir: str | Path | None = None
) -> SequenceDescriptor:
    """Inspect one sequence directory.

    Frames are taken from ``img1/`` when present, else from the directory
    itself. Depth maps default to a ``depth/`` sibling of the frames.
    ``seqinfo.ini`` supplies the name, frame rate and resolution when
    available.
    """
    seq_dir = Path(seq_dir)
    if not seq_dir.is_dir():
        raise DatasetError(f"sequence directory not found: {seq_dir}")
    nested = seq_dir / "img1"
    image_dir = nested if nested.is_dir() else seq_dir
    frames = _list_frames(image_dir)
    if not frames:
        raise DatasetError(f"no image frames in {image_dir}")
    name = seq_dir.name
    frame_rate = DEFAULT_FRAME_RATE
    resolution = None
    ini_path = seq_dir / SEQINFO_NAME
    if ini_path.is_file():
        parser = configparser.ConfigParser()
        parser.read(ini_path)
        if parser.has_section("Sequence"):
            section = parser["Sequence"]
            name = section.get("name", name)
            frame_rate = section.getfloat("frameRate", frame_rate)
            if "imWidth" in section and "imHeight" in section:
                resolution = (section.getint("imWidth"), section.getint("imHeight"))
    return SequenceDescriptor(
        name=name,
        root=seq_dir,
        image_dir=image_dir,
        depth_dir=Path(depth_dir) if depth_dir is not None else seq_dir / "depth",
        frames=frames,
        frame_rate=frame_rate,
        resolution=resolution,
    )


def _depth_path(seq: SequenceDescriptor, frame_name: str) -> Path:
    stem = Path(frame_name).stem
    for ext in DEPTH_EXTENSIONS:
        candidate = seq.depth_dir / (stem + ext)
        if candidate.is_file():
            return candidate
    raise DatasetError(
        f"sequence {seq.name}: no depth map for frame {frame_name!r} "
        f"in {seq.depth_dir}"
    )


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _convert_depth(
    raw: RelativeInverseDepth, cal: DepthCalibration | None
) -> MetricDepth:
    return to_metric(raw, cal) if cal is not None else to_pseudo_depth(raw)


def _estimate_light(
    cfg: FogConfig, first_image: RasterImage, first_depth: MetricDepth
) -> AtmosphericLight:
    if cfg.light == "fixed":
        assert cfg.light_color is not None
        return AtmosphericLight(cfg.light_color)
    if cfg.light == "sky":
        return estimate_light_sky(first_image, first_depth, cfg.far_fraction)
    return estimate_light_dcp(
        first_image, PatchSpec(cfg.patch_size), cfg.top_fraction
    )


def _format_float(x: float) -> str:
    return repr(float(x))


def _manifest_text(
    seq: SequenceDescriptor,
    cfg: FogConfig,
    light: AtmosphericLight,
    tau: TurbulenceMap | None,
    frame_rows: list[tuple[str, str, str, str]],
) -> str:
    beta = cfg.attenuation().beta
    lines = [
        f"sequence={seq.name}",
        f"mode={cfg.mode}",
        f"level={cfg.level if cfg.level is not None else 'none'}",
        "visibility="
        + (_format_float(cfg.visibility) if cfg.visibility is not None else "none"),
        f"beta={_format_float(beta)}",
        f"seed={cfg.seed}",
        f"light={cfg.light}",
        "airlight=" + " ".join(_format_float(c) for c in light.color),
        "reference="
        + (
            f"{_format_float(cfg.reference.d_min)} {_format_float(cfg.reference.d_max)}"
            if cfg.reference is not None
            else "none"
        ),
        f"patch_size={cfg.patch_size}",
        f"top_fraction={_format_float(cfg.top_fraction)}",
        f"far_fraction={_format_float(cfg.far_fraction)}",
        f"octaves={cfg.octaves}",
        f"brightness={_format_float(cfg.brightness)}",
        f"base_cells={cfg.base_cells}",
        "tau_sha256="
        + (
            hashlib.sha256(tau.values.tobytes()).hexdigest()
            if tau is not None
            else "none"
        ),
        f"lossless={str(cfg.lossless).lower()}",
        f"frames={len(frame_rows)}",
    ]
    for in_name, out_name, sha_in, sha_out in frame_rows:
        lines.append(f"frame {in_name} -> {out_name} in={sha_in} out={sha_out}")
    return "\n".join(lines) + "\n"


def render_sequence(
    seq: SequenceDescriptor,
    cfg: FogConfig,
    out_dir: str | Path,
    threads: int | None = None,
) -> RenderedSequence:
    """Render fog over every frame of one sequence.

    The output directory mirrors the input layout (img1/ nesting, frame
    filenames, gt/ and seqinfo.ini copied byte for byte). With
    ``cfg.lossless`` the frames are written as PNG regardless of the
    input format; otherwise the input extension is kept.
    """
    out_dir = Path(out_dir)
    cal = calibrate(cfg.reference) if cfg.reference is not None else None

    # Resolve every depth path up front so a missing map fails the
    # sequence before any output is written.
    depth_paths = {name: _depth_path(seq, name) for name in seq.frames}

    first_image = read_image(seq.image_dir / seq.frames[0])
    first_depth = _convert_depth(load_depth(depth_paths[seq.frames[0]]), cal)
    if first_image.shape != first_depth.shape:
        raise DatasetError(
            f"sequence {seq.name}: frame {seq.frames[0]!r} is "
            f"{first_image.shape} but its depth map is {first_depth.shape}"
        )
    light = _estimate_light(cfg, first_image, first_depth)
    attenuation = cfg.attenuation()
    tau = None
    if cfg.heterogeneous:
        tau = turbulence_texture(
            first_image.width,
            first_image.height,
            octaves=cfg.octaves,
            seed=cfg.seed,
            brightness=cfg.brightness,
            base_cells=cfg.base_cells,
        )

    out_image_dir = out_dir / "img1" if seq.nested_images else out_dir
    out_image_dir.mkdir(parents=True, exist_ok=True)

    def render_frame(frame_name: str) -> tuple[str, str, str, str]:
        in_path = seq.image_dir / frame_name
        image = read_image(in_path)
        depth = _convert_depth(load_depth(depth_paths[frame_name]), cal)
        if image.shape != depth.shape:
            raise DatasetError(
                f"sequence {seq.name}: frame {frame_name!r} is "
                f"{image.shape} but its depth map is {depth.shape}"
            )
        if tau is not None:
            trans = heterogeneous_transmission(depth, tau, attenuation)
        else:
            trans = transmission(depth, attenuation)
        fogged = composite(image, trans, light)
        out_name = (
            Path(frame_name).stem + ".png" if cfg.lossless else frame_name
        )
        out_path = out_image_dir / out_name
        write_image(out_path, fogged)
        return frame_name, out_name, _sha256(in_path), _sha256(out_path)

    with ThreadPoolExecutor(max_workers=thread_count(threads)) as pool:
        frame_rows = list(pool.map(render_frame, seq.frames))

    gt_dir = seq.root / "gt"
    if gt_dir.is_dir():
        shutil.copytree(gt_dir, out_dir / "gt", dirs_exist_ok=True)
    ini_path = seq.root / SEQINFO_NAME
    if ini_path.is_file():
        shutil.copyfile(ini_path, out_dir / SEQINFO_NAME)

    manifest_path = out_dir / MANIFEST_NAME
    manifest_path.write_text(
        _manifest_text(seq, cfg, light, tau, frame_rows), encoding="utf-8"
    )
    return RenderedSequence(
        name=seq.name,
        out_dir=out_dir,
        manifest_path=manifest_path,
        n_frames=len(frame_rows),
    )


def sequence_seed(base: int, name: str) -> int:
    """Per-sequence seed: stable across runs, distinct across sequences."""
    return base ^ zlib.crc32(name.encode("utf-8"))


def discover_dataset(
    root: str | Path, depth_root: str | Path | None = None
) -> list[SequenceDescriptor]:
    """All sequences under a dataset root, sorted by directory name."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root not found: {root}")
    depth_root = Path(depth_root) if depth_root is not None else None
    sequences = []
    for child in sorted(root.iterdir()):
        if not child.is_dir():
            continue
        has_frames = (child / "img1").is_dir() or _list_frames(child)
        if not has_frames:
            continue
        depth_dir = depth_root / child.name if depth_root is not None else None
        sequences.append(discover_sequence(child, depth_dir))
    if not sequences:
        raise DatasetError(f"no sequences found under {root}")
    return sequences


def render_dataset(
    root: str | Path,
    cfg: FogConfig,
    out_root: str | Path,
    depth_root: str | Path | None = None,
    threads: int | None = None,
) -> DatasetRenderResult:
    """Render fog over every sequence of a dataset.

    Each sequence gets a seed derived from the configured seed and its
    name, so sequences differ from each other but reruns are identical.
    A failing sequence is reported and skipped; the remaining sequences
    still render.
    """
    sequences = discover_dataset(root, depth_root)
    out_root = Path(out_root)
    rendered = []
    failures = []
    for seq in sequences:
        seq_cfg = replace(cfg, seed=sequence_seed(cfg.seed, seq.name))
        try:
            rendered.append(
                render_sequence(seq, seq_cfg, out_root / seq.root.name, threads)
            )
        except (FogsimError, ValueError, OSError) as exc:
            failures.append((seq.root.name, str(exc)))
    return DatasetRenderResult(rendered=tuple(rendered), failures=tuple(failures))
