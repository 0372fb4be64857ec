"""Score in-repertoire and out-of-repertoire poses against a vertical-arm reference."""
import argparse

import numpy as np

from poseclone.metrics import coverage_report
from poseclone.pose import DescriptorSequence
from poseclone.synthetic import DOWN, horizontal_arm_pose, stick_figure, vertical_arm_repertoire


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=100)
    parser.add_argument("--jitter", type=float, default=5.0, help="arm angle spread, degrees")
    parser.add_argument("--gamma", type=float, default=8.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    ref = DescriptorSequence.from_skeletons(
        vertical_arm_repertoire(args.frames, args.jitter, args.seed))
    rng = np.random.default_rng(args.seed + 1)
    queries = {
        "arms down": stick_figure((128.0, 90.0), arm_angles=DOWN + rng.uniform(-2, 2, 4)),
        "arms raised 45 deg": stick_figure((128.0, 90.0), arm_angles=(135, 135, 45, 45)),
        "arms horizontal": horizontal_arm_pose(),
    }
    rep = coverage_report(DescriptorSequence.from_skeletons(queries.values()), ref, args.gamma)
    for i, name in enumerate(queries):
        flagged = rep.flagged[i].nonzero()[0].tolist()
        print(f"{name:>20}: distance {rep.frame_distance[i]:7.3f}  flagged limbs {flagged}")


if __name__ == "__main__":
    main()
