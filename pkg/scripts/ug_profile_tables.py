#!/usr/bin/env python3
"""Angular profiles and uncertainty-gap convergence data as TSV files.

Writes ``profiles_lam<lam>.tsv`` (peak-normalised von Mises, wrapped Gaussian
and cake profiles) and ``ug_convergence.tsv`` into the output directory.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from cakelift.fileio import provenance, write_tsv
from cakelift.profiles import angular_profile_table
from cakelift.uncertainty import ug_convergence_table


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--lambda", dest="lam", type=float, default=0.2)
    ap.add_argument("--orders", default="3,6,9,12")
    args = ap.parse_args()

    orders = [int(k) for k in args.orders.split(",")]
    args.out_dir.mkdir(parents=True, exist_ok=True)
    meta = provenance(["ug_profile_tables.py"] + sys.argv[1:])

    names, table = angular_profile_table(args.lam, 512, orders)
    write_tsv(args.out_dir / f"profiles_lam{args.lam:g}.tsv", names, table, {**meta, "lambda": args.lam})

    lambdas = np.round(np.arange(1, 21) * 0.05, 2)
    ug = ug_convergence_table(orders, lambdas)
    write_tsv(args.out_dir / "ug_convergence.tsv", ug.columns, ug.rows, meta)

    width = max(len(c) for c in ug.columns)
    print("  ".join(c.rjust(width) for c in ug.columns))
    for row in ug.rows:
        print("  ".join(f"{v:{width}.6f}" for v in row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
