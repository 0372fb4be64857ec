"""Per-video pose alignment and per-channel standardization of confidence volumes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeError, UnalignableSequence
from .pose import L_HIP, R_HIP, Skeleton

STD_EPS = 1e-8


@dataclass(frozen=True)
class SkeletonSequence:
    frames: tuple[Skeleton, ...]
    frame_height: int
    frame_width: int

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ShapeError("skeleton sequence is empty")
        if len({s.num_joints for s in frames}) != 1:
            raise ShapeError("all skeletons in a sequence need the same joint count")
        object.__setattr__(self, "frames", frames)

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    @property
    def center(self) -> tuple[float, float]:
        """Coordinates of the frame center (pixel centers sit on integers)."""
        return (self.frame_width - 1) / 2.0, (self.frame_height - 1) / 2.0


@dataclass(frozen=True)
class SimilarityTransform:
    """``p' = scale * p + translate``, one per video."""

    scale: float
    translate: tuple[float, float]

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "translate", (float(self.translate[0]), float(self.translate[1])))

    def apply(self, skeleton: Skeleton) -> Skeleton:
        return skeleton.transformed(self.scale, self.translate)

    def to_dict(self) -> dict:
        return {"scale": self.scale, "translate": list(self.translate)}


@dataclass(frozen=True)
class ChannelStats:
    mean: np.ndarray
    std: np.ndarray


def mean_hip_width(seq: SkeletonSequence) -> float:
    widths = [
        np.hypot(*(s.xy[R_HIP] - s.xy[L_HIP]))
        for s in seq
        if s.present[R_HIP] and s.present[L_HIP]
    ]
    if not widths:
        raise UnalignableSequence("unalignable: no frame has both hips present")
    return float(np.mean(widths))


def mean_center(seq: SkeletonSequence) -> np.ndarray:
    """Time-average of per-frame centroids over frames with any joint present."""
    centroids = [s.xy[s.present].mean(axis=0) for s in seq if s.present.any()]
    return np.mean(centroids, axis=0)


def align_sequence(seq: SkeletonSequence, target_hip_width: float,
                   target_center=None) -> tuple[SkeletonSequence, SimilarityTransform]:
    """Scale so the mean hip width is ``target_hip_width`` and move the mean
    center to ``target_center`` (default: the frame center)."""
    if not target_hip_width > 0:
        raise ValueError("target hip width must be positive")
    if target_center is None:
        target_center = seq.center
    hip = mean_hip_width(seq)
    if hip <= 0:
        raise UnalignableSequence("unalignable: hip joints coincide")
    scale = target_hip_width / hip
    translate = np.asarray(target_center, dtype=np.float64) - scale * mean_center(seq)
    tf = SimilarityTransform(scale, tuple(translate))
    aligned = SkeletonSequence(tuple(tf.apply(s) for s in seq), seq.frame_height, seq.frame_width)
    return aligned, tf


def standardize_channels(volumes: Sequence[np.ndarray]) -> tuple[np.ndarray, ChannelStats]:
    """Standardize each joint channel to zero mean, unit variance over a whole video.

    Statistics are population moments over all frames and pixels of a
    channel, computed in two passes. Channels with std below ``STD_EPS``
    come out all-zero with std recorded as 0.
    """
    if len(volumes) == 0:
        raise ShapeError("no volumes to standardize")
    shapes = {np.shape(v) for v in volumes}
    if len(shapes) != 1 or len(next(iter(shapes))) != 3:
        raise ShapeError(f"volumes must share one (J, H, W) shape, got {sorted(shapes)}")
    stack = np.stack([np.asarray(v, dtype=np.float64) for v in volumes])
    axes = (0, 2, 3)
    mean = stack.mean(axis=axes)
    centered = stack - mean[None, :, None, None]
    std = np.sqrt(np.mean(centered * centered, axis=axes))
    degenerate = std < STD_EPS
    std = np.where(degenerate, 0.0, std)
    safe = np.where(degenerate, 1.0, std)
    out = centered / safe[None, :, None, None]
    out[:, degenerate] = 0.0
    return out, ChannelStats(mean, std)
