"""Fidelity of product (F) and source (F0) versus a, for theta = 0 and pi/5.

Writes plot-ready CSV to stdout or the given path:

    python scripts/fidelity_curves.py curves.csv
"""
import csv
import math
import sys

import numpy as np

from wlift.protocol import SourceSpec, analytic_fidelity, source_fidelity


def main(path=None):
    out = open(path, "w", newline="") if path else sys.stdout
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["theta", "a", "F", "F0"])
    for theta in (0.0, math.pi / 5):
        for a in np.linspace(0.0, 1.0, 201):
            spec = SourceSpec(float(a), theta)
            writer.writerow([f"{theta:.12g}", f"{a:.12g}",
                             f"{analytic_fidelity(spec):.12g}", f"{source_fidelity(spec):.12g}"])
    if path:
        out.close()


if __name__ == "__main__":
    main(*sys.argv[1:2])
