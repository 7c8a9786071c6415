"""Multi-object tracking metrics and MOT-format annotation I/O.

Implements the three standard tracking scores on axis-aligned boxes:

* CLEAR (MOTA/MOTP): per-frame correspondence with match persistence.
  Pairs matched in the previous frame persist while their overlap stays
  at or above the threshold; remaining boxes are matched by maximum
  cardinality, minimum total (1 - IoU) cost. MOTA folds misses, false
  positives and identity switches into one error rate; MOTP is the mean
  overlap of matched pairs. An identity switch is counted when a ground
  truth track's matched prediction id differs between its consecutive
  matched frames, tolerating unmatched gaps in between.
* IDF1: a single global bipartite matching between ground truth and
  predicted trajectories maximizes the number of frames with overlap at
  or above the threshold; IDF1 is the F1 score of that assignment.
* HOTA: detection and association quality measured jointly, averaged
  over 19 overlap thresholds alpha in {0.05, ..., 0.95}. Per-frame
  matching maximizes a score that weighs overlap by a global alignment
  prior, so the matching is shared by all alpha levels and association
  is rewarded consistently.

All scores are percentages in [0, 100].
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

DEFAULT_IOU_THRESHOLD = 0.5
PEDESTRIAN_CLASS = 1

# Cost placeholder for pairs below the overlap threshold. Any value far
# above the largest possible real total cost makes the solver maximize
# match cardinality before minimizing cost.
_INFEASIBLE_COST = 1.0e6

_HOTA_ALPHAS = np.arange(0.05, 0.96, 0.05)
_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in pixel coordinates: top-left corner plus size."""

    left: float
    top: float
    width: float
    height: float

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and self.height > 0.0):
            raise ValueError(
                f"box must have positive size, got {self.width}x{self.height}"
            )

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        return self.top + self.height

    @property
    def area(self) -> float:
        return self.width * self.height


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; 0 when disjoint."""
    iw = min(a.right, b.right) - max(a.left, b.left)
    if iw <= 0.0:
        return 0.0
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


@dataclass(frozen=True)
class TrackRecord:
    """One annotated box: frame index (1-based), track identity, geometry."""

    frame: int
    track_id: int
    box: Box
    confidence: float = 1.0
    class_id: int = PEDESTRIAN_CLASS
    visibility: float = 1.0

    def __post_init__(self) -> None:
        if self.frame < 1:
            raise ValueError(f"frame indices start at 1, got {self.frame}")


@dataclass(frozen=True)
class TrackSet:
    """Immutable collection of track records, unique per (frame, track_id)."""

    records: tuple[TrackRecord, ...]

    def __init__(self, records: Iterable[TrackRecord] = ()) -> None:
        ordered = tuple(sorted(records, key=lambda r: (r.frame, r.track_id)))
        seen: set[tuple[int, int]] = set()
        for rec in ordered:
            key = (rec.frame, rec.track_id)
            if key in seen:
                raise ValueError(
                    f"duplicate record for frame {rec.frame}, track {rec.track_id}"
                )
            seen.add(key)
        object.__setattr__(self, "records", ordered)

    def __len__(self) -> int:
        return len(self.records)

    @cached_property
    def _frame_index(self) -> dict[int, tuple[TrackRecord, ...]]:
        index: dict[int, list[TrackRecord]] = {}
        for rec in self.records:
            index.setdefault(rec.frame, []).append(rec)
        return {f: tuple(rs) for f, rs in index.items()}

    def frames(self) -> list[int]:
        """Sorted frame indices that contain at least one record."""
        return sorted(self._frame_index)

    def ids(self) -> list[int]:
        """Sorted distinct track identities."""
        return sorted({rec.track_id for rec in self.records})

    def at_frame(self, frame: int) -> tuple[TrackRecord, ...]:
        """Records of one frame, ordered by track id."""
        return self._frame_index.get(frame, ())


@dataclass(frozen=True)
class ClearMotResult:
    """CLEAR scores plus the event counts they are built from."""

    mota: float
    motp: float
    false_positives: int
    false_negatives: int
    id_switches: int
    n_matches: int
    gt_count: int


@dataclass(frozen=True)
class MetricReport:
    """All tracking scores of one (ground truth, prediction) pair."""

    hota: float
    mota: float
    motp: float
    idf1: float
    id_switches: int
    false_positives: int
    false_negatives: int
    gt_count: int


def _check_threshold(threshold: float) -> None:
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"IoU threshold must lie in (0, 1], got {threshold}")


def _min_cost_matches(
    gt_recs: Sequence[TrackRecord],
    pr_recs: Sequence[TrackRecord],
    threshold: float,
) -> list[tuple[TrackRecord, TrackRecord, float]]:
    """Maximum-cardinality, minimum (1 - IoU) matching over feasible pairs."""
    if not gt_recs or not pr_recs:
        return []
    overlap = np.array(
        [[iou(g.box, p.box) for p in pr_recs] for g in gt_recs], dtype=np.float64
    )
    feasible = overlap >= threshold
    if not feasible.any():
        return []
    cost = np.where(feasible, 1.0 - overlap, _INFEASIBLE_COST)
    rows, cols = linear_sum_assignment(cost)
    out = []
    for r, c in zip(rows, cols):
        if feasible[r, c]:
            out.append((gt_recs[r], pr_recs[c], float(overlap[r, c])))
    return out


def clear_mot(
    gt: TrackSet,
    predictions: TrackSet,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> ClearMotResult:
    """CLEAR correspondence protocol producing MOTA and MOTP.

    Frames are processed in order. Pairs matched in the previous frame
    persist when both boxes are present and still overlap at or above the
    threshold; the remainder is matched from scratch. MOTA may be
    negative when errors outnumber ground truth boxes. MOTP is reported
    as 0 when nothing was ever matched.
    """
    _check_threshold(iou_threshold)
    if len(gt) == 0:
        raise ValueError("cannot score against empty ground truth")
    frames = sorted(set(gt.frames()) | set(predictions.frames()))
    prev_pair: dict[int, int] = {}
    last_matched_pred: dict[int, int] = {}
    fp = fn = idsw = 0
    iou_total = 0.0
    n_matches = 0
    for f in frames:
        g_recs = gt.at_frame(f)
        p_recs = predictions.at_frame(f)
        p_by_id = {rec.track_id: rec for rec in p_recs}
        matches: dict[int, tuple[int, float]] = {}
        used_pred: set[int] = set()
        for g in g_recs:
            pid = prev_pair.get(g.track_id)
            if pid is None or pid not in p_by_id:
                continue
            overlap = iou(g.box, p_by_id[pid].box)
            if overlap >= iou_threshold:
                matches[g.track_id] = (pid, overlap)
                used_pred.add(pid)
        rem_g = [g for g in g_recs if g.track_id not in matches]
        rem_p = [p for p in p_recs if p.track_id not in used_pred]
        for g_rec, p_rec, overlap in _min_cost_matches(rem_g, rem_p, iou_threshold):
            matches[g_rec.track_id] = (p_rec.track_id, overlap)
            used_pred.add(p_rec.track_id)
        fn += len(g_recs) - len(matches)
        fp += len(p_recs) - len(matches)
        for gid in sorted(matches):
            pid, overlap = matches[gid]
            iou_total += overlap
            n_matches += 1
            before = last_matched_pred.get(gid)
            if before is not None and before != pid:
                idsw += 1
            last_matched_pred[gid] = pid
        prev_pair = {gid: pid for gid, (pid, _) in matches.items()}
    gt_count = len(gt)
    mota = 100.0 * (1.0 - (fn + fp + idsw) / gt_count)
    motp = 100.0 * iou_total / n_matches if n_matches else 0.0
    return ClearMotResult(
        mota=mota,
        motp=motp,
        false_positives=fp,
        false_negatives=fn,
        id_switches=idsw,
        n_matches=n_matches,
        gt_count=gt_count,
    )


def idf1(
    gt: TrackSet,
    predictions: TrackSet,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> float:
    """Identity F1: F-score of the best global trajectory assignment.

    Trajectories are matched one-to-one to maximize the total number of
    frames where both boxes exist and overlap at or above the threshold.
    Two empty sets score 100 (vacuously perfect); one empty side scores 0.
    """
    _check_threshold(iou_threshold)
    n_gt = len(gt)
    n_pr = len(predictions)
    if n_gt == 0 and n_pr == 0:
        return 100.0
    if n_gt == 0 or n_pr == 0:
        return 0.0
    gt_ids = gt.ids()
    pr_ids = predictions.ids()
    g_index = {tid: k for k, tid in enumerate(gt_ids)}
    p_index = {tid: k for k, tid in enumerate(pr_ids)}
    hits = np.zeros((len(gt_ids), len(pr_ids)), dtype=np.float64)
    for f in sorted(set(gt.frames()) & set(predictions.frames())):
        for g in gt.at_frame(f):
            for p in predictions.at_frame(f):
                if iou(g.box, p.box) >= iou_threshold:
                    hits[g_index[g.track_id], p_index[p.track_id]] += 1.0
    rows, cols = linear_sum_assignment(-hits)
    idtp = float(hits[rows, cols].sum())
    # IDFN + IDFP = (n_gt - IDTP) + (n_pr - IDTP); denominator reduces to
    # n_gt + n_pr.
    return 100.0 * 2.0 * idtp / (n_gt + n_pr)


def hota(gt: TrackSet, predictions: TrackSet) -> float:
    """Higher-order tracking accuracy averaged over 19 overlap levels.

    For each frame a single matching maximizes IoU weighted by a global
    trajectory alignment prior; each overlap level alpha then keeps the
    matched pairs with IoU >= alpha as true positives. Detection accuracy
    DetA = TP/(TP+FN+FP) and association accuracy AssA (mean alignment of
    matched trajectory pairs) combine as sqrt(DetA * AssA) per level, and
    levels are averaged.
    """
    if len(gt) == 0:
        raise ValueError("cannot score against empty ground truth")
    if len(predictions) == 0:
        return 0.0
    gt_ids = gt.ids()
    pr_ids = predictions.ids()
    g_index = {tid: k for k, tid in enumerate(gt_ids)}
    p_index = {tid: k for k, tid in enumerate(pr_ids)}
    n_g = len(gt_ids)
    n_p = len(pr_ids)
    gt_frames_per_id = np.zeros(n_g, dtype=np.float64)
    pr_frames_per_id = np.zeros(n_p, dtype=np.float64)
    potential = np.zeros((n_g, n_p), dtype=np.float64)
    frames = sorted(set(gt.frames()) | set(predictions.frames()))
    per_frame: list[tuple[list[int], list[int], np.ndarray]] = []
    for f in frames:
        g_recs = gt.at_frame(f)
        p_recs = predictions.at_frame(f)
        g_idx = [g_index[r.track_id] for r in g_recs]
        p_idx = [p_index[r.track_id] for r in p_recs]
        for k in g_idx:
            gt_frames_per_id[k] += 1.0
        for k in p_idx:
            pr_frames_per_id[k] += 1.0
        sim = np.array(
            [[iou(g.box, p.box) for p in p_recs] for g in g_recs], dtype=np.float64
        ).reshape(len(g_recs), len(p_recs))
        if g_idx and p_idx:
            # Per-frame alignment estimate: how exclusively this pair
            # overlaps, relative to all competing overlap in the frame.
            denom = sim.sum(axis=0)[None, :] + sim.sum(axis=1)[:, None] - sim
            contrib = np.zeros_like(sim)
            mask = denom > _EPS
            contrib[mask] = sim[mask] / denom[mask]
            potential[np.ix_(g_idx, p_idx)] += contrib
        per_frame.append((g_idx, p_idx, sim))
    alignment = potential / (
        gt_frames_per_id[:, None] + pr_frames_per_id[None, :] - potential
    )
    matched: list[tuple[int, int, float]] = []
    for g_idx, p_idx, sim in per_frame:
        if not g_idx or not p_idx:
            continue
        score = alignment[np.ix_(g_idx, p_idx)] * sim
        rows, cols = linear_sum_assignment(-score)
        for r, c in zip(rows, cols):
            matched.append((g_idx[r], p_idx[c], float(sim[r, c])))
    total_gt = float(gt_frames_per_id.sum())
    total_pr = float(pr_frames_per_id.sum())
    level_scores = []
    for alpha in _HOTA_ALPHAS:
        pairs = [(g, p) for g, p, s in matched if s >= alpha - _EPS]
        tp = len(pairs)
        if tp == 0:
            level_scores.append(0.0)
            continue
        det_a = tp / (total_gt + total_pr - tp)
        pair_counts = Counter(pairs)
        ass_sum = 0.0
        for (g, p), count in pair_counts.items():
            pair_alignment = count / (
                gt_frames_per_id[g] + pr_frames_per_id[p] - count
            )
            ass_sum += count * pair_alignment
        ass_a = ass_sum / tp
        level_scores.append(float(np.sqrt(det_a * ass_a)))
    return 100.0 * float(np.mean(level_scores))


def evaluate(
    gt: TrackSet,
    predictions: TrackSet,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> MetricReport:
    """Score predictions against ground truth with all supported metrics."""
    clear = clear_mot(gt, predictions, iou_threshold)
    return MetricReport(
        hota=hota(gt, predictions),
        mota=clear.mota,
        motp=clear.motp,
        idf1=idf1(gt, predictions, iou_threshold),
        id_switches=clear.id_switches,
        false_positives=clear.false_positives,
        false_negatives=clear.false_negatives,
        gt_count=clear.gt_count,
    )


def _parse_number(token: str, path: Path, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise ValueError(f"{path}:{lineno}: invalid {what} {token!r}") from exc


def _parse_int(token: str, path: Path, lineno: int, what: str) -> int:
    value = _parse_number(token, path, lineno, what)
    if value != int(value):
        raise ValueError(f"{path}:{lineno}: {what} must be an integer, got {token!r}")
    return int(value)


def load_mot_file(path: str | Path, kind: str | None = None) -> TrackSet:
    """Read a MOT-format CSV annotation file.

    Rows are ``frame,id,left,top,width,height,confidence[,...]``. For
    ground truth (``kind="gt"``) the trailing fields are the class id and
    visibility; rows flagged inactive (confidence 0) or belonging to a
    class other than pedestrian are dropped. For tracker output
    (``kind="result"``) trailing fields are ignored. When ``kind`` is
    omitted, files named gt.txt are treated as ground truth.
    """
    path = Path(path)
    if kind is None:
        kind = "gt" if path.name == "gt.txt" else "result"
    if kind not in ("gt", "result"):
        raise ValueError(f"unknown annotation kind {kind!r}")
    records = []
    seen: dict[tuple[int, int], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(",")
            if len(tokens) < 7:
                raise ValueError(
                    f"{path}:{lineno}: expected at least 7 fields, got {len(tokens)}"
                )
            frame = _parse_int(tokens[0], path, lineno, "frame index")
            track_id = _parse_int(tokens[1], path, lineno, "track id")
            left = _parse_number(tokens[2], path, lineno, "left")
            top = _parse_number(tokens[3], path, lineno, "top")
            width = _parse_number(tokens[4], path, lineno, "width")
            height = _parse_number(tokens[5], path, lineno, "height")
            conf = _parse_number(tokens[6], path, lineno, "confidence")
            class_id = PEDESTRIAN_CLASS
            vis = 1.0
            if kind == "gt":
                if len(tokens) >= 8:
                    class_id = _parse_int(tokens[7], path, lineno, "class id")
                if len(tokens) >= 9:
                    vis = _parse_number(tokens[8], path, lineno, "visibility")
                if conf == 0.0 or class_id != PEDESTRIAN_CLASS:
                    continue
            key = (frame, track_id)
            if key in seen:
                raise ValueError(
                    f"{path}:{lineno}: duplicate of frame {frame}, track {track_id} "
                    f"first seen on line {seen[key]}"
                )
            seen[key] = lineno
            try:
                box = Box(left=left, top=top, width=width, height=height)
                record = TrackRecord(
                    frame=frame,
                    track_id=track_id,
                    box=box,
                    confidence=conf,
                    class_id=class_id,
                    visibility=vis,
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            records.append(record)
    return TrackSet(records)


def write_mot_file(path: str | Path, tracks: TrackSet, kind: str = "result") -> None:
    """Write a track set as a MOT-format CSV file.

    Floats are written with repr precision, so a write/load round trip
    reproduces the records exactly.
    """
    if kind not in ("gt", "result"):
        raise ValueError(f"unknown annotation kind {kind!r}")
    lines = []
    for rec in tracks.records:
        head = (
            f"{rec.frame},{rec.track_id},{rec.box.left!r},{rec.box.top!r},"
            f"{rec.box.width!r},{rec.box.height!r},{rec.confidence!r}"
        )
        if kind == "gt":
            lines.append(f"{head},{rec.class_id},{rec.visibility!r}")
        else:
            lines.append(f"{head},-1,-1,-1")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
