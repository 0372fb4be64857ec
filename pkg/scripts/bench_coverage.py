"""Time the coverage scan for a driving sequence against a reference sequence."""
import argparse
import time

import numpy as np

from poseclone.metrics import coverage_report, worker_count
from poseclone.pose import DescriptorSequence


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reference", type=int, default=3000)
    parser.add_argument("--driving", type=int, default=1000)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    ref = DescriptorSequence(rng.uniform(-60, 60, (args.reference, 12, 2)),
                             np.ones((args.reference, 12), bool))
    drv = DescriptorSequence(rng.uniform(-60, 60, (args.driving, 12, 2)),
                             np.ones((args.driving, 12), bool))
    evals = args.reference * args.driving * 12
    for _ in range(args.repeat):
        start = time.perf_counter()
        coverage_report(drv, ref, workers=args.threads)
        dt = time.perf_counter() - start
        print(f"{evals / 1e6:.0f}M limb distances, {worker_count(args.threads)} threads: "
              f"{dt:.3f}s ({evals / dt / 1e6:.0f}M/s)")


if __name__ == "__main__":
    main()
