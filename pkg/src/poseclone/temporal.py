"""Flow warping, the limb-weighted temporal coherence loss, and reenactment evaluation.

Frames are float or uint8 arrays of shape ``(H, W, 3)`` (any trailing
channel count works, as does ``(H, W)``). Flow fields are ``(H, W, 2)``
holding ``(du, dv)``: the x and y displacement of each pixel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ShapeError
from .pose import DEFAULT_LIMBS, LimbSet, Skeleton, check_volume

DEFAULT_SIGMA_ALPHA = 10.0


def check_flow(flow: np.ndarray, height: int | None = None, width: int | None = None) -> np.ndarray:
    flow = np.asarray(flow, dtype=np.float64)
    if flow.ndim != 3 or flow.shape[2] != 2:
        raise ShapeError(f"flow must be (H, W, 2), got {flow.shape}")
    if height is not None and flow.shape[:2] != (height, width):
        raise ShapeError(f"flow is {flow.shape[:2]}, image is {(height, width)}")
    if not np.all(np.isfinite(flow)):
        raise ValueError("flow contains non-finite displacements")
    return flow


def warp(image: np.ndarray, flow: np.ndarray) -> np.ndarray:
    """Backward-warp ``image``: ``out[y, x] = image(x + du, y + dv)``.

    Bilinear interpolation; sample positions are clamped to the image border.
    Integer displacements reproduce the source pixels exactly.
    """
    image = np.asarray(image)
    if image.ndim not in (2, 3):
        raise ShapeError(f"image must be (H, W) or (H, W, C), got {image.shape}")
    h, w = image.shape[:2]
    flow = check_flow(flow, h, w)
    img = image.astype(np.float64, copy=False)

    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    sx = np.clip(xs + flow[..., 0], 0, w - 1)
    sy = np.clip(ys + flow[..., 1], 0, h - 1)
    x0 = np.minimum(np.floor(sx).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(sy).astype(np.intp), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = sx - x0
    fy = sy - y0
    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    top = (1 - fx) * img[y0, x0] + fx * img[y0, x1]
    bottom = (1 - fx) * img[y1, x0] + fx * img[y1, x1]
    return (1 - fy) * top + fy * bottom


def segment_distance_field(skeleton: Skeleton, limbs: LimbSet, height: int, width: int) -> np.ndarray:
    """Distance from every pixel center to the nearest valid limb segment.

    Returns an ``(H, W)`` array, all-inf when no limb has both endpoints.
    """
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    best = np.full((height, width), np.inf)
    for a, b in limbs:
        if not (skeleton.present[a] and skeleton.present[b]):
            continue
        ax, ay = skeleton.xy[a]
        bx, by = skeleton.xy[b]
        ex, ey = bx - ax, by - ay
        length2 = ex * ex + ey * ey
        px, py = xs - ax, ys - ay
        if length2 > 0:
            t = np.clip((px * ex + py * ey) / length2, 0.0, 1.0)
        else:
            t = 0.0
        d = np.hypot(px - t * ex, py - t * ey)
        np.minimum(best, d, out=best)
    return best


def limb_weight_map(skeleton: Skeleton, limbs: LimbSet = DEFAULT_LIMBS, height: int = 256,
                    width: int = 256, sigma_alpha: float = DEFAULT_SIGMA_ALPHA) -> np.ndarray:
    """Gaussian falloff ``exp(-d^2 / 2 sigma^2)`` of the distance to the skeleton's limbs."""
    if not sigma_alpha > 0:
        raise ValueError(f"sigma_alpha must be positive, got {sigma_alpha}")
    d = segment_distance_field(skeleton, limbs, height, width)
    return np.exp(-(d * d) / (2.0 * sigma_alpha * sigma_alpha))


def tc_loss(gen_i: np.ndarray, gen_next: np.ndarray, flow: np.ndarray, alpha: np.ndarray,
            normalize: str = "pixels") -> float:
    """Alpha-weighted L1 distance between the warped frame ``i`` and frame ``i+1``.

    ``normalize`` picks the reduction: ``"pixels"`` (mean over pixels and
    channels), ``"alpha"`` (divide by the total weight times channels) or
    ``"sum"`` (plain L1 norm).
    """
    gen_i = np.asarray(gen_i)
    gen_next = np.asarray(gen_next)
    alpha = np.asarray(alpha, dtype=np.float64)
    if gen_i.shape != gen_next.shape:
        raise ShapeError(f"frame shapes differ: {gen_i.shape} vs {gen_next.shape}")
    if alpha.shape != gen_i.shape[:2]:
        raise ShapeError(f"weight map is {alpha.shape}, frames are {gen_i.shape[:2]}")
    diff = np.abs(warp(gen_i, flow) - gen_next.astype(np.float64))
    channels = diff.shape[2] if diff.ndim == 3 else 1
    if diff.ndim == 3:
        alpha = alpha[..., None]
    total = float(np.sum(alpha * diff))
    if normalize == "sum":
        return total
    if normalize == "pixels":
        return total / diff.size
    if normalize == "alpha":
        weight = float(alpha.sum()) * channels
        return total / weight if weight > 0 else 0.0
    raise ValueError(f"unknown normalization {normalize!r}")


def mse(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> float:
    """Mean squared error over frames, pixels and channels."""
    if len(a) != len(b):
        raise ShapeError(f"sequence lengths differ: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ShapeError("empty frame sequences")
    sse = 0.0
    count = 0
    for fa, fb in zip(a, b):
        fa = np.asarray(fa, dtype=np.float64)
        fb = np.asarray(fb, dtype=np.float64)
        if fa.shape != fb.shape:
            raise ShapeError(f"frame shapes differ: {fa.shape} vs {fb.shape}")
        d = fa - fb
        sse += float(np.sum(d * d))
        count += d.size
    return sse / count


@dataclass(frozen=True)
class Split:
    train: range
    test: range

    def to_dict(self) -> dict:
        return {"train": [self.train.start, self.train.stop],
                "test": [self.test.start, self.test.stop]}


def reenact_split(length: int, train_fraction=Fraction(2, 3)) -> Split:
    """Contiguous train/test split: the first ``floor(length * fraction)`` frames train.

    Float fractions are snapped to the nearest simple ratio, so ``2/3``
    gives exactly 2000 of 3000 frames.
    """
    if length < 3:
        raise ShapeError(f"need at least 3 frames to split, got {length}")
    frac = Fraction(train_fraction).limit_denominator(10**6)
    if not 0 < frac < 1:
        raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")
    k = math.floor(length * frac)
    return Split(range(0, k), range(k, length))


@dataclass(frozen=True, eq=False)
class PoseWindow:
    """N consecutive confidence volumes packed frame-major into ``(J*N, H, W)``."""

    packed: np.ndarray
    n: int

    @property
    def joints(self) -> int:
        return self.packed.shape[0] // self.n

    def unpack(self) -> list[np.ndarray]:
        j = self.joints
        return [self.packed[k * j:(k + 1) * j] for k in range(self.n)]


def pack_pose_window(poses: Sequence[np.ndarray]) -> PoseWindow:
    if len(poses) < 1:
        raise ShapeError("a pose window needs at least one volume")
    poses = [check_volume(p) for p in poses]
    if len({p.shape for p in poses}) != 1:
        raise ShapeError("volumes in a pose window must share (J, H, W)")
    return PoseWindow(np.concatenate(poses, axis=0), len(poses))
