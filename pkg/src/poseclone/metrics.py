"""Translation-invariant pose metrics and driving-vs-reference coverage analysis."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import IncomparablePoses, ShapeError
from .pose import DescriptorSequence, PoseDescriptor

log = logging.getLogger(__name__)

DEFAULT_GAMMA = 8.0
THREADS_ENV = "POSECLONE_THREADS"

# driving frames per block in the coverage scan; bounds a block's
# temporaries at BLOCK * |reference| * L float64 values
_BLOCK = 32


def _limb_norms(diff: np.ndarray) -> np.ndarray:
    return np.sqrt(diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1])


def _check_lengths(a: PoseDescriptor, b) -> None:
    if len(a) != b.disp.shape[-2]:
        raise ShapeError(f"limb counts differ: {len(a)} vs {b.disp.shape[-2]}")


def pose_distance(a: PoseDescriptor, b: PoseDescriptor) -> float:
    """Mean limb-wise Euclidean distance over limbs valid in both descriptors."""
    _check_lengths(a, b)
    common = a.valid & b.valid
    if not common.any():
        raise IncomparablePoses("descriptors share no valid limb")
    return float(np.mean(_limb_norms(a.disp[common] - b.disp[common])))


@dataclass(frozen=True)
class LimbDistances:
    distance: np.ndarray  # (L,), NaN where invalid
    flagged: np.ndarray   # (L,) bool
    valid: np.ndarray     # (L,) bool


def per_limb_distances(a: PoseDescriptor, b: PoseDescriptor,
                       gamma: float = DEFAULT_GAMMA) -> LimbDistances:
    _check_lengths(a, b)
    valid = a.valid & b.valid
    dist = np.where(valid, _limb_norms(a.disp - b.disp), np.nan)
    flagged = valid & (np.nan_to_num(dist, nan=-np.inf) > gamma)
    return LimbDistances(dist, flagged, valid)


@dataclass(frozen=True)
class SequenceMatch:
    """Result of matching one pose against a reference sequence.

    ``limb_distance[l]`` is the distance of limb ``l`` to its nearest
    counterpart and ``nn_frame[l]`` that counterpart's frame index; both
    are NaN / -1 for limbs that took no part in the average.
    """

    distance: float
    limb_distance: np.ndarray
    nn_frame: np.ndarray
    warnings: tuple[str, ...] = ()


def _nearest_limbs(disp: np.ndarray, valid: np.ndarray, ref: DescriptorSequence):
    """Vectorized nearest-limb search for a block of query descriptors.

    ``disp`` is ``(B, L, 2)``, ``valid`` ``(B, L)``. Returns per-limb minimum
    distances ``(B, L)`` (inf when no reference frame has the limb) and
    argmin frame indices ``(B, L)``; argmin picks the first minimum.
    """
    diff = ref.disp[None, :, :, :] - disp[:, None, :, :]
    d = _limb_norms(diff)                                  # (B, T, L)
    d[:, ~ref.valid] = np.inf
    nn = np.argmin(d, axis=1)                              # (B, L)
    best = np.take_along_axis(d, nn[:, None, :], axis=1)[:, 0, :]
    best[~valid] = np.inf
    return best, nn


def _finish(best: np.ndarray, nn: np.ndarray, valid: np.ndarray, ref_has_limb: np.ndarray):
    """Turn raw per-limb minima of one query into a SequenceMatch (or raise)."""
    used = valid & ref_has_limb
    warnings = tuple(
        f"limb {l} is valid in the query but in no reference frame"
        for l in np.flatnonzero(valid & ~ref_has_limb)
    )
    if not used.any():
        raise IncomparablePoses("no limb is valid in both the query and the reference")
    limb_distance = np.where(used, best, np.nan)
    nn_frame = np.where(used, nn, -1)
    return SequenceMatch(float(np.mean(best[used])), limb_distance, nn_frame, warnings)


def pose_to_sequence(p: PoseDescriptor, v: DescriptorSequence) -> SequenceMatch:
    """Average over limbs of each limb's distance to its nearest neighbor in ``v``.

    Every limb is matched independently, so different limbs may pick
    different reference frames. Ties go to the smallest frame index.
    """
    _check_lengths(p, v)
    best, nn = _nearest_limbs(p.disp[None], p.valid[None], v)
    match = _finish(best[0], nn[0], p.valid, v.valid.any(axis=0))
    for w in match.warnings:
        log.warning(w)
    return match


@dataclass
class CoverageReport:
    """Per driving frame and limb distances to the nearest reference limbs.

    Frames with no comparable limb have NaN distance (serialized as null).
    """

    frame_distance: np.ndarray   # (D,)
    limb_distance: np.ndarray    # (D, L)
    nn_frame: np.ndarray         # (D, L), -1 where unused
    flagged: np.ndarray          # (D, L)
    gamma: float
    warnings: list[str] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        ok = np.isfinite(self.frame_distance)
        return {
            "frames": int(self.frame_distance.shape[0]),
            "comparable_frames": int(ok.sum()),
            # strict JSON has no infinity literal
            "gamma": self.gamma if math.isfinite(self.gamma) else str(self.gamma),
            "mean_distance": float(self.frame_distance[ok].mean()) if ok.any() else None,
            "max_distance": float(self.frame_distance[ok].max()) if ok.any() else None,
            "fraction_frames_with_any_flag": float(self.flagged.any(axis=1).mean()),
        }

    def per_frame(self) -> list[dict]:
        out = []
        for i, dist in enumerate(self.frame_distance):
            out.append({
                "frame_index": i,
                "distance": None if math.isnan(dist) else float(dist),
                "per_limb": [
                    {
                        "distance": None if math.isnan(d) else float(d),
                        "nn_frame_index": None if n < 0 else int(n),
                        "flagged": bool(f),
                    }
                    for d, n, f in zip(self.limb_distance[i], self.nn_frame[i], self.flagged[i])
                ],
            })
        return out

    def rows(self):
        """Yield ``(frame, limb, distance, nn_frame, flagged)`` tuples."""
        for i in range(self.limb_distance.shape[0]):
            for l in range(self.limb_distance.shape[1]):
                d = self.limb_distance[i, l]
                n = self.nn_frame[i, l]
                yield (i, l, None if math.isnan(d) else float(d),
                       None if n < 0 else int(n), bool(self.flagged[i, l]))


def worker_count(workers: int | None = None) -> int:
    """Worker threads to use; ``POSECLONE_THREADS`` caps it (0 or unset = auto)."""
    if workers is None:
        try:
            workers = int(os.environ.get(THREADS_ENV, "0"))
        except ValueError:
            workers = 0
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def coverage_report(driving: DescriptorSequence, reference: DescriptorSequence,
                    gamma: float = DEFAULT_GAMMA, workers: int | None = None) -> CoverageReport:
    """Match every driving pose against the reference repertoire.

    Flat scan over all (driving frame, reference frame, limb) triples, split
    into blocks of driving frames that may run on a thread pool. Every block
    writes only its own rows, so results do not depend on scheduling.
    """
    if driving.disp.shape[1] != reference.disp.shape[1]:
        raise ShapeError("driving and reference use different limb counts")
    n, num_limbs = driving.valid.shape
    best = np.empty((n, num_limbs))
    nn = np.empty((n, num_limbs), dtype=np.intp)

    def run(start):
        stop = min(start + _BLOCK, n)
        best[start:stop], nn[start:stop] = _nearest_limbs(
            driving.disp[start:stop], driving.valid[start:stop], reference)

    starts = range(0, n, _BLOCK)
    workers = min(worker_count(workers), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)

    ref_has_limb = reference.valid.any(axis=0)
    frame_distance = np.full(n, np.nan)
    limb_distance = np.full((n, num_limbs), np.nan)
    nn_frame = np.full((n, num_limbs), -1, dtype=np.intp)
    warnings = []
    for i in range(n):
        try:
            m = _finish(best[i], nn[i], driving.valid[i], ref_has_limb)
        except IncomparablePoses as e:
            warnings.append(f"frame {i}: {e}")
            continue
        frame_distance[i] = m.distance
        limb_distance[i] = m.limb_distance
        nn_frame[i] = m.nn_frame
        warnings.extend(f"frame {i}: {w}" for w in m.warnings)
    for w in warnings[:10]:
        log.warning(w)
    flagged = np.nan_to_num(limb_distance, nan=-np.inf) > gamma
    return CoverageReport(frame_distance, limb_distance, nn_frame, flagged, float(gamma), warnings)


@dataclass(frozen=True)
class LossWeights:
    lambda_vgg: float = 10.0
    lambda_s: float = 0.1
    lambda_tc: float = 10.0

    def __post_init__(self):
        for name in ("lambda_vgg", "lambda_s", "lambda_tc"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class LossComponents:
    gan_p: float = 0.0
    vgg: float = 0.0
    gan_s: float = 0.0
    tc: float = 0.0


def aggregate_losses(c: LossComponents, w: LossWeights = LossWeights()) -> dict:
    """Combine externally computed loss terms into the paired-branch and total loss."""
    values = (c.gan_p, c.vgg, c.gan_s, c.tc)
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"loss components must be finite, got {values}")
    rec = c.gan_p + w.lambda_vgg * c.vgg
    total = rec + w.lambda_s * (c.gan_s + w.lambda_tc * c.tc)
    return {"rec": rec, "total": total}
