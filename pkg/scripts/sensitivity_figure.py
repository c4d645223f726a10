#!/usr/bin/env python3
"""Write a plot-ready sensitivity sweep (absolute effect vs exposure risk).

The sweep traces the identified absolute effect among the exposed across the
feasible exposure-risk range [mu0, 1]; the endpoints coincide with the sharp
upper and lower bounds.  Output is the standard
``p_exposure,p_outcome_given_exposure,acece`` CSV.
"""

import argparse
import csv
import sys

from cece import sensitivity
from cece.data import ArmSummary


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mu1", type=float, default=0.009)
    parser.add_argument("--mu0", type=float, default=0.031)
    parser.add_argument("--n1", type=int, default=5807)
    parser.add_argument("--n0", type=int, default=5829)
    parser.add_argument("--grid", type=int, default=101)
    parser.add_argument("--out", default="-", help="output CSV path (default stdout)")
    args = parser.parse_args()

    summary = ArmSummary.from_aggregates(
        mu1=args.mu1, mu0=args.mu0, n1=args.n1, n0=args.n0
    )
    curve = sensitivity.sensitivity_sweep(summary, args.grid)

    handle = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["p_exposure", "p_outcome_given_exposure", "acece"])
        for point in curve.points:
            writer.writerow(
                [
                    f"{point.p_exposure:.12g}",
                    f"{point.p_outcome_given_exposure:.12g}",
                    f"{point.acece:.12g}",
                ]
            )
    finally:
        if handle is not sys.stdout:
            handle.close()


if __name__ == "__main__":
    main()
