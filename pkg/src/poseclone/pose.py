"""Pose data structures: skeletons, part confidence maps and limb descriptors.

Coordinates are continuous ``(x, y)`` pairs in pixels, ``x`` along columns and
``y`` along rows. Pixel ``(row, col)`` is sampled at its center, which has
coordinates ``(col, row)``.

Confidence volumes are plain float arrays of shape ``(J, H, W)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError

NUM_JOINTS = 18

JOINT_NAMES = (
    "nose", "neck",
    "r_shoulder", "r_elbow", "r_wrist",
    "l_shoulder", "l_elbow", "l_wrist",
    "r_hip", "r_knee", "r_ankle",
    "l_hip", "l_knee", "l_ankle",
    "r_eye", "l_eye", "r_ear", "l_ear",
)
JOINT_INDEX = {name: i for i, name in enumerate(JOINT_NAMES)}

R_HIP = JOINT_INDEX["r_hip"]
L_HIP = JOINT_INDEX["l_hip"]

DEFAULT_SIGMA = 6.0
DEFAULT_MIN_CONFIDENCE = 0.05


def default_sigma(height: int, width: int, base: float = DEFAULT_SIGMA) -> float:
    """Scale a width defined for 256x256 frames to the given frame size."""
    return base * min(height, width) / 256.0


@dataclass(frozen=True)
class LimbSet:
    """Ordered (joint_a, joint_b) pairs; the descriptor of a limb is a - b."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(a), int(b)) for a, b in self.pairs)
        if len(pairs) != 12:
            raise ShapeError(f"a limb set has exactly 12 limbs, got {len(pairs)}")
        if len(set(pairs)) != len(pairs):
            raise ShapeError("duplicate limb in limb set")
        for a, b in pairs:
            if not (0 <= a < NUM_JOINTS and 0 <= b < NUM_JOINTS):
                raise ShapeError(f"limb ({a}, {b}) has a joint index outside [0, 17]")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def first(self) -> np.ndarray:
        return np.array([a for a, _ in self.pairs], dtype=np.intp)

    @property
    def second(self) -> np.ndarray:
        return np.array([b for _, b in self.pairs], dtype=np.intp)


# neck-shoulder, upper arm, forearm per side; neck-hip, thigh, shin per side
DEFAULT_LIMBS = LimbSet((
    (1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (6, 7),
    (1, 8), (8, 9), (9, 10), (1, 11), (11, 12), (12, 13),
))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Skeleton:
    """Joint positions of a single person.

    ``xy`` is ``(J, 2)``, ``confidence`` is ``(J,)`` and ``present`` is a
    ``(J,)`` bool mask. Coordinates and confidence of absent joints are NaN.
    """

    xy: np.ndarray
    confidence: np.ndarray
    present: np.ndarray

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=np.float64)
        conf = np.asarray(self.confidence, dtype=np.float64)
        present = np.asarray(self.present, dtype=bool)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ShapeError(f"joint coordinates must be (J, 2), got {xy.shape}")
        if conf.shape != (xy.shape[0],) or present.shape != (xy.shape[0],):
            raise ShapeError("confidence and presence must have one entry per joint")
        if not np.all(np.isfinite(xy[present])):
            raise ValueError("present joints must have finite coordinates")
        xy = np.where(present[:, None], xy, np.nan)
        conf = np.where(present, conf, np.nan)
        object.__setattr__(self, "xy", _frozen(xy))
        object.__setattr__(self, "confidence", _frozen(conf))
        object.__setattr__(self, "present", _frozen(present))

    @classmethod
    def from_joints(cls, joints: Sequence[Sequence[float] | None]) -> "Skeleton":
        """Build from a list of ``(x, y[, confidence])`` tuples or ``None``."""
        n = len(joints)
        xy = np.full((n, 2), np.nan)
        conf = np.full(n, np.nan)
        present = np.zeros(n, dtype=bool)
        for j, joint in enumerate(joints):
            if joint is None:
                continue
            xy[j] = joint[0], joint[1]
            conf[j] = joint[2] if len(joint) > 2 else 1.0
            present[j] = True
        return cls(xy, conf, present)

    @classmethod
    def empty(cls, num_joints: int = NUM_JOINTS) -> "Skeleton":
        return cls.from_joints([None] * num_joints)

    def to_joints(self) -> list[tuple[float, float, float] | None]:
        return [
            (float(x), float(y), float(c)) if p else None
            for (x, y), c, p in zip(self.xy, self.confidence, self.present)
        ]

    @property
    def num_joints(self) -> int:
        return self.xy.shape[0]

    def transformed(self, scale: float = 1.0, translate=(0.0, 0.0)) -> "Skeleton":
        """Return ``scale * p + translate`` applied to every present joint."""
        xy = self.xy * scale + np.asarray(translate, dtype=np.float64)
        return Skeleton(xy, self.confidence, self.present)

    def translated(self, dx: float, dy: float) -> "Skeleton":
        return Skeleton(self.xy + np.array([dx, dy]), self.confidence, self.present)

    def __eq__(self, other):
        if not isinstance(other, Skeleton):
            return NotImplemented
        return (
            np.array_equal(self.present, other.present)
            and np.array_equal(self.xy[self.present], other.xy[other.present])
            and np.array_equal(self.confidence[self.present], other.confidence[other.present])
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PoseDescriptor:
    """Per-limb displacement vectors ``(dx, dy)``.

    ``disp`` is ``(L, 2)``; ``valid`` is ``(L,)``. Invalid entries hold NaN.
    """

    disp: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        disp = np.asarray(self.disp, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if disp.ndim != 2 or disp.shape[1] != 2 or valid.shape != (disp.shape[0],):
            raise ShapeError(f"descriptor must be (L, 2) with an (L,) mask, got {disp.shape}")
        disp = np.where(valid[:, None], disp, np.nan)
        object.__setattr__(self, "disp", _frozen(disp))
        object.__setattr__(self, "valid", _frozen(valid))

    @classmethod
    def from_array(cls, disp) -> "PoseDescriptor":
        """Descriptor from an ``(L, 2)`` array; NaN rows are invalid."""
        disp = np.asarray(disp, dtype=np.float64)
        return cls(disp, np.all(np.isfinite(disp), axis=-1))

    def __len__(self):
        return self.disp.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PoseDescriptor):
            return NotImplemented
        return np.array_equal(self.valid, other.valid) and np.array_equal(
            self.disp[self.valid], other.disp[other.valid])

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DescriptorSequence:
    """Stacked descriptors of a sequence: ``disp`` is ``(T, L, 2)``, ``valid`` ``(T, L)``."""

    disp: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        disp = np.asarray(self.disp, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        if disp.ndim != 3 or disp.shape[2] != 2 or valid.shape != disp.shape[:2]:
            raise ShapeError(f"descriptor sequence must be (T, L, 2), got {disp.shape}")
        if disp.shape[0] == 0:
            raise ShapeError("descriptor sequence is empty")
        disp = np.where(valid[..., None], disp, np.nan)
        object.__setattr__(self, "disp", _frozen(disp))
        object.__setattr__(self, "valid", _frozen(valid))

    @classmethod
    def from_descriptors(cls, descriptors: Iterable[PoseDescriptor]) -> "DescriptorSequence":
        descriptors = list(descriptors)
        if not descriptors:
            raise ShapeError("descriptor sequence is empty")
        return cls(np.stack([d.disp for d in descriptors]),
                   np.stack([d.valid for d in descriptors]))

    @classmethod
    def from_skeletons(cls, skeletons: Iterable[Skeleton],
                       limbs: LimbSet = DEFAULT_LIMBS) -> "DescriptorSequence":
        return cls.from_descriptors(descriptor(s, limbs) for s in skeletons)

    def __len__(self):
        return self.disp.shape[0]

    def __getitem__(self, i) -> PoseDescriptor:
        return PoseDescriptor(self.disp[i], self.valid[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def concat(self, other: "DescriptorSequence") -> "DescriptorSequence":
        return DescriptorSequence(np.concatenate([self.disp, other.disp]),
                                  np.concatenate([self.valid, other.valid]))


def check_volume(volume: np.ndarray) -> np.ndarray:
    volume = np.asarray(volume)
    if volume.ndim != 3 or min(volume.shape) < 1:
        raise ShapeError(f"confidence volume must be (J, H, W), got {volume.shape}")
    return volume


def extract_skeleton(volume: np.ndarray,
                     min_confidence: float = DEFAULT_MIN_CONFIDENCE) -> Skeleton:
    """Locate each joint at the maximum of its confidence map.

    Ties go to the smallest row, then the smallest column (row-major argmax).
    Joints whose peak is below ``min_confidence`` are absent.
    """
    volume = check_volume(volume)
    num_joints, _, width = volume.shape
    flat = volume.reshape(num_joints, -1)
    idx = np.argmax(flat, axis=1)
    peak = flat[np.arange(num_joints), idx].astype(np.float64)
    rows, cols = np.divmod(idx, width)
    xy = np.stack([cols, rows], axis=1).astype(np.float64)
    return Skeleton(xy, peak, peak >= min_confidence)


def render_pose(skeleton: Skeleton, height: int, width: int,
                sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """Render one Gaussian part confidence map per joint.

    Returns a float64 ``(J, height, width)`` volume with peak value 1 at
    each present joint and all-zero channels for absent joints.
    """
    if height <= 0 or width <= 0:
        raise ShapeError(f"frame size must be positive, got {height}x{width}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    out = np.zeros((skeleton.num_joints, height, width))
    cols = np.arange(width, dtype=np.float64)
    rows = np.arange(height, dtype=np.float64)
    denom = 2.0 * sigma * sigma
    for j in np.flatnonzero(skeleton.present):
        x, y = skeleton.xy[j]
        # separable: exp(-(dx^2 + dy^2)/2s^2) = exp(-dy^2/2s^2) * exp(-dx^2/2s^2)
        gy = np.exp(-((rows - y) ** 2) / denom)
        gx = np.exp(-((cols - x) ** 2) / denom)
        out[j] = np.outer(gy, gx)
    return out


def descriptor(skeleton: Skeleton, limbs: LimbSet = DEFAULT_LIMBS) -> PoseDescriptor:
    """Displacement ``joint_a - joint_b`` of every limb; invalid if either end is absent."""
    a, b = limbs.first, limbs.second
    if max(a.max(), b.max()) >= skeleton.num_joints:
        raise ShapeError("limb set references joints the skeleton does not have")
    disp = skeleton.xy[a] - skeleton.xy[b]
    valid = skeleton.present[a] & skeleton.present[b]
    return PoseDescriptor(disp, valid)
