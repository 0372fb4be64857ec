"""Numerical machinery for video performance cloning: pose maps, pose metrics,
coverage analysis, flow-warped temporal coherence and reenactment evaluation."""

from .errors import FormatError, IncomparablePoses, ShapeError, UnalignableSequence
from .metrics import (CoverageReport, LossComponents, LossWeights, aggregate_losses,
                      coverage_report, per_limb_distances, pose_distance, pose_to_sequence)
from .normalize import (ChannelStats, SimilarityTransform, SkeletonSequence, align_sequence,
                        standardize_channels)
from .pose import (DEFAULT_LIMBS, JOINT_NAMES, DescriptorSequence, LimbSet, PoseDescriptor,
                   Skeleton, descriptor, extract_skeleton, render_pose)
from .temporal import (PoseWindow, limb_weight_map, mse, pack_pose_window, reenact_split,
                       tc_loss, warp)

__all__ = [
    "FormatError", "IncomparablePoses", "ShapeError", "UnalignableSequence",
    "CoverageReport", "LossComponents", "LossWeights", "aggregate_losses", "coverage_report",
    "per_limb_distances", "pose_distance", "pose_to_sequence",
    "ChannelStats", "SimilarityTransform", "SkeletonSequence", "align_sequence",
    "standardize_channels",
    "DEFAULT_LIMBS", "JOINT_NAMES", "DescriptorSequence", "LimbSet", "PoseDescriptor",
    "Skeleton", "descriptor", "extract_skeleton", "render_pose",
    "PoseWindow", "limb_weight_map", "mse", "pack_pose_window", "reenact_split", "tc_loss", "warp",
]
