"""Shared fixtures: randomized tracking instances and on-disk datasets."""
from __future__ import annotations

import numpy as np
import pytest

from fogsim import (
    Box,
    RasterImage,
    TrackRecord,
    TrackSet,
    write_image,
    write_pfm,
)


def random_tracking_instance(
    rng: np.random.Generator,
    max_tracks: int = 5,
    max_frames: int = 20,
) -> tuple[TrackSet, TrackSet]:
    """A ground truth set and a plausibly flawed prediction set.

    Predictions are built from the ground truth with dropped boxes,
    coordinate jitter, identity fragmentation and spurious tracks, so
    the scored instances exercise misses, false positives and identity
    switches. All coordinates are continuous, which keeps assignment
    ties out of the generated population.
    """
    n_tracks = int(rng.integers(1, max_tracks + 1))
    n_frames = int(rng.integers(5, max_frames + 1))
    gt_records = []
    per_track_frames: dict[int, list[tuple[int, Box]]] = {}
    for i in range(n_tracks):
        tid = i + 1
        left = float(rng.uniform(0.0, 70.0))
        top = float(rng.uniform(0.0, 70.0))
        width = float(rng.uniform(8.0, 25.0))
        height = float(rng.uniform(8.0, 25.0))
        vx = float(rng.uniform(-3.0, 3.0))
        vy = float(rng.uniform(-3.0, 3.0))
        present = [f for f in range(1, n_frames + 1) if rng.random() < 0.85]
        if not present:
            present = [int(rng.integers(1, n_frames + 1))]
        rows = []
        for f in present:
            box = Box(
                left + vx * (f - 1) + float(rng.uniform(-0.5, 0.5)),
                top + vy * (f - 1) + float(rng.uniform(-0.5, 0.5)),
                width,
                height,
            )
            gt_records.append(TrackRecord(frame=f, track_id=tid, box=box))
            rows.append((f, box))
        per_track_frames[tid] = rows

    pred_records = []
    next_pred_id = 1
    for tid, rows in per_track_frames.items():
        # Fragment the track into up to three identity segments.
        segment_id = next_pred_id
        next_pred_id += 1
        for k, (f, box) in enumerate(rows):
            if k > 0 and rng.random() < 0.15:
                segment_id = next_pred_id
                next_pred_id += 1
            if rng.random() >= 0.8:
                continue
            jittered = Box(
                box.left + float(rng.uniform(-6.0, 6.0)),
                box.top + float(rng.uniform(-6.0, 6.0)),
                box.width * float(rng.uniform(0.75, 1.3)),
                box.height * float(rng.uniform(0.75, 1.3)),
            )
            pred_records.append(
                TrackRecord(frame=f, track_id=segment_id, box=jittered)
            )
    n_spurious = int(rng.integers(0, 3))
    for j in range(n_spurious):
        tid = 1000 + j
        for f in range(1, n_frames + 1):
            if rng.random() < 0.25:
                pred_records.append(
                    TrackRecord(
                        frame=f,
                        track_id=tid,
                        box=Box(
                            float(rng.uniform(0.0, 80.0)),
                            float(rng.uniform(0.0, 80.0)),
                            float(rng.uniform(5.0, 20.0)),
                            float(rng.uniform(5.0, 20.0)),
                        ),
                    )
                )
    return TrackSet(gt_records), TrackSet(pred_records)


def relabel_tracks(tracks: TrackSet, stride: int = 13, offset: int = 5000) -> TrackSet:
    """Apply a bijective, order-scrambling identity relabeling."""
    ids = tracks.ids()
    mapping = {
        tid: offset + stride * (len(ids) - k) for k, tid in enumerate(ids)
    }
    return TrackSet(
        TrackRecord(
            frame=rec.frame,
            track_id=mapping[rec.track_id],
            box=rec.box,
            confidence=rec.confidence,
            class_id=rec.class_id,
            visibility=rec.visibility,
        )
        for rec in tracks.records
    )


def build_sequence(
    seq_dir,
    n_frames: int = 5,
    size: tuple[int, int] = (48, 36),
    seed: int = 0,
    image_ext: str = ".png",
    with_gt: bool = True,
    with_seqinfo: bool = True,
    depth_for: set[int] | None = None,
) -> None:
    """Write one on-disk sequence: frames, depth maps, gt and seqinfo."""
    width, height = size
    rng = np.random.default_rng(seed)
    (seq_dir / "img1").mkdir(parents=True)
    (seq_dir / "depth").mkdir()
    for f in range(1, n_frames + 1):
        image = RasterImage(rng.uniform(size=(height, width, 3)))
        write_image(seq_dir / "img1" / f"{f:06d}{image_ext}", image)
        if depth_for is None or f in depth_for:
            depth = rng.uniform(0.05, 1.0, size=(height, width))
            write_pfm(seq_dir / "depth" / f"{f:06d}.pfm", depth)
    if with_gt:
        (seq_dir / "gt").mkdir()
        rows = []
        for f in range(1, n_frames + 1):
            rows.append(f"{f},1,{4 + f},6,10,14,1,1,1.0")
            rows.append(f"{f},2,{20 + f},12,9,12,1,1,1.0")
        (seq_dir / "gt" / "gt.txt").write_text("\n".join(rows) + "\n")
    if with_seqinfo:
        (seq_dir / "seqinfo.ini").write_text(
            "[Sequence]\n"
            f"name={seq_dir.name}\n"
            "imDir=img1\n"
            "frameRate=30\n"
            f"seqLength={n_frames}\n"
            f"imWidth={width}\n"
            f"imHeight={height}\n"
            f"imExt={image_ext}\n"
        )


@pytest.fixture
def dataset_factory(tmp_path):
    """Build a small tracking dataset under tmp_path and return its root."""

    def build(
        n_seqs: int = 2,
        n_frames: int = 5,
        size: tuple[int, int] = (48, 36),
        image_ext: str = ".png",
        root_name: str = "train",
        **kwargs,
    ):
        root = tmp_path / root_name
        root.mkdir(parents=True, exist_ok=True)
        for s in range(1, n_seqs + 1):
            build_sequence(
                root / f"SEQ-{s:02d}",
                n_frames=n_frames,
                size=size,
                seed=s,
                image_ext=image_ext,
                **kwargs,
            )
        return root

    return build
