#!/usr/bin/env python3
"""Lift a random image with a trained kernel and with shift-twisted cake
wavelets, and report how far apart the two orientation scores are.

Also sweeps the number of atoms and orientations to show the residual stays
at rounding level.
"""

import argparse
import sys
import time

import numpy as np

from cakelift.transform import TrainedKernelModel, disk_limit, equivalence_residual
from cakelift.wavelets import build_stack


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--spline-order", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    f = rng.standard_normal((args.size, args.size))
    print("N\tatoms\tresidual\tseconds")
    for n in (4, 8, 16):
        stack = build_stack(args.size, args.size, n, args.spline_order)
        fd, _ = disk_limit(f, stack.radial)
        for atoms in (1, 5, 20):
            model = TrainedKernelModel.random(rng, atoms, stack.shape, stack.radial.rho0)
            t0 = time.perf_counter()
            res = equivalence_residual(fd, model, stack)
            print(f"{n}\t{atoms}\t{res:.3e}\t{time.perf_counter() - t0:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
