#!/usr/bin/env python3
"""Convert the UCI automobile file (imports-85.data) to the rocmar dataset CSV.

    python3 scripts/prepare_automobile.py imports-85.data automobile.csv

Populations: symboling <= 0 is H, > 0 is D. The biomarker is
normalized-losses ('?' becomes missing).

Covariates:
    x1 width, x2 engine-size,
    x3..x6 body-style indicators (hardtop, hatchback, sedan, wagon;
           convertible is the reference level),
    x7 height, x8 compression-ratio.

Propensity columns 1-6 and regression columns 1,7,8 reproduce the
published analysis:

    rocmar estimate --input automobile.csv --method all \
        --propensity-cols 1,2,3,4,5,6 --regression-cols 1,7,8 --output auto.csv
"""

import csv
import sys

SYMBOLING, LOSSES, BODY, WIDTH, HEIGHT, ENGINE, COMPRESSION = 0, 1, 6, 11, 12, 16, 20
STYLES = ["hardtop", "hatchback", "sedan", "wagon"]


def main(src, dst):
    with open(src, newline="") as f:
        rows = [r for r in csv.reader(f) if r]
    with open(dst, "w", newline="") as f:
        out = csv.writer(f, lineterminator="\n")
        out.writerow(["pop", "y"] + [f"x{k}" for k in range(1, 9)])
        for r in rows:
            pop = "D" if int(r[SYMBOLING]) > 0 else "H"
            y = "" if r[LOSSES] == "?" else r[LOSSES]
            dummies = ["1" if r[BODY] == s else "0" for s in STYLES]
            out.writerow([pop, y, r[WIDTH], r[ENGINE]] + dummies + [r[HEIGHT], r[COMPRESSION]])


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
