"""Procedural stick figures for tests, demos and benchmarks.

Angles are in degrees, measured from the +x axis towards +y (image rows
grow downwards, so 90 points down).
"""
from __future__ import annotations

import numpy as np

from .pose import JOINT_INDEX, NUM_JOINTS, Skeleton

DOWN = 90.0


def _step(origin, angle, length):
    a = np.deg2rad(angle)
    return origin + length * np.array([np.cos(a), np.sin(a)])


def stick_figure(center=(128.0, 128.0), limb_length=40.0, arm_angles=None, leg_angles=None,
                 shoulder_width=None, hip_width=None) -> Skeleton:
    """Build an 18-joint skeleton with the neck at ``center``.

    ``arm_angles`` is ``(r_upper, r_fore, l_upper, l_fore)`` and
    ``leg_angles`` ``(r_thigh, r_shin, l_thigh, l_shin)``; both default to
    straight down. Head joints are placed above the neck.
    """
    arm = arm_angles if arm_angles is not None else (DOWN,) * 4
    leg = leg_angles if leg_angles is not None else (DOWN,) * 4
    half_sh = (shoulder_width if shoulder_width is not None else limb_length) / 2
    half_hip = (hip_width if hip_width is not None else 0.5 * limb_length) / 2
    xy = np.zeros((NUM_JOINTS, 2))
    neck = np.asarray(center, dtype=np.float64)
    J = JOINT_INDEX
    xy[J["neck"]] = neck
    xy[J["nose"]] = neck + (0, -0.5 * limb_length)
    xy[J["r_eye"]] = neck + (-0.15 * limb_length, -0.6 * limb_length)
    xy[J["l_eye"]] = neck + (0.15 * limb_length, -0.6 * limb_length)
    xy[J["r_ear"]] = neck + (-0.3 * limb_length, -0.55 * limb_length)
    xy[J["l_ear"]] = neck + (0.3 * limb_length, -0.55 * limb_length)

    xy[J["r_shoulder"]] = neck + (-half_sh, 0)
    xy[J["r_elbow"]] = _step(xy[J["r_shoulder"]], arm[0], limb_length)
    xy[J["r_wrist"]] = _step(xy[J["r_elbow"]], arm[1], limb_length)
    xy[J["l_shoulder"]] = neck + (half_sh, 0)
    xy[J["l_elbow"]] = _step(xy[J["l_shoulder"]], arm[2], limb_length)
    xy[J["l_wrist"]] = _step(xy[J["l_elbow"]], arm[3], limb_length)

    pelvis = neck + (0, 1.5 * limb_length)
    xy[J["r_hip"]] = pelvis + (-half_hip, 0)
    xy[J["r_knee"]] = _step(xy[J["r_hip"]], leg[0], limb_length)
    xy[J["r_ankle"]] = _step(xy[J["r_knee"]], leg[1], limb_length)
    xy[J["l_hip"]] = pelvis + (half_hip, 0)
    xy[J["l_knee"]] = _step(xy[J["l_hip"]], leg[2], limb_length)
    xy[J["l_ankle"]] = _step(xy[J["l_knee"]], leg[3], limb_length)
    return Skeleton(xy, np.ones(NUM_JOINTS), np.ones(NUM_JOINTS, dtype=bool))


def rotate_joint(skeleton: Skeleton, joint: int, pivot: int, degrees: float) -> Skeleton:
    """Rotate one joint about another, leaving every other joint in place."""
    a = np.deg2rad(degrees)
    rot = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
    xy = skeleton.xy.copy()
    xy[joint] = xy[pivot] + rot @ (xy[joint] - xy[pivot])
    return Skeleton(xy, skeleton.confidence, skeleton.present)


def vertical_arm_repertoire(n=100, jitter=5.0, seed=0, limb_length=40.0):
    """``n`` poses with arms hanging within ``jitter`` degrees of vertical,
    with the whole body wandering around the frame."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        arms = DOWN + rng.uniform(-jitter, jitter, size=4)
        legs = DOWN + rng.uniform(-jitter, jitter, size=4)
        center = (128.0, 90.0) + rng.uniform(-30, 30, size=2)
        out.append(stick_figure(center, limb_length, arms, legs))
    return out


def horizontal_arm_pose(center=(128.0, 90.0), limb_length=40.0) -> Skeleton:
    """Both arms stretched out sideways (a T-pose)."""
    return stick_figure(center, limb_length, arm_angles=(180.0, 180.0, 0.0, 0.0))
