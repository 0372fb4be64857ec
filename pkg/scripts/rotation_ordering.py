"""Rotate the right forearm of a stick figure and report pose distances and flagged limbs."""
import argparse

from poseclone.metrics import per_limb_distances, pose_distance
from poseclone.pose import descriptor
from poseclone.synthetic import rotate_joint, stick_figure


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--limb-length", type=float, default=40.0)
    parser.add_argument("--gamma", type=float, default=8.0)
    parser.add_argument("--angles", type=float, nargs="+", default=[0, 10, 45, 90, 135, 180])
    args = parser.parse_args()

    base = stick_figure(center=(128.0, 80.0), limb_length=args.limb_length)
    ref = descriptor(base)
    print(f"{'angle':>6} {'distance':>9}  flagged limbs (gamma={args.gamma:g})")
    for angle in args.angles:
        q = descriptor(rotate_joint(base, 4, 3, angle))
        flagged = per_limb_distances(ref, q, args.gamma).flagged.nonzero()[0].tolist()
        print(f"{angle:6.0f} {pose_distance(ref, q):9.3f}  {flagged}")


if __name__ == "__main__":
    main()
