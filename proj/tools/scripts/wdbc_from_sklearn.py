#!/usr/bin/env python3
"""Rebuild data/wdbc.data from the copy of WDBC bundled with scikit-learn.

scikit-learn ships the same 569 rows as the UCI file but drops the patient
ids and encodes the diagnosis as 0 = malignant, 1 = benign. This script writes
the UCI layout (id, diagnosis, 30 features) with ids set to the 1-based row
number. Feature text is copied verbatim so no value is re-rounded.
"""
import argparse
import csv
import pathlib

import sklearn.datasets


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", type=pathlib.Path)
    args = parser.parse_args()

    src = pathlib.Path(sklearn.datasets.__file__).parent / "data" / "breast_cancer.csv"
    with src.open() as fh, args.output.open("w") as out:
        reader = csv.reader(fh)
        next(reader)  # "569,30,malignant,benign"
        for row_number, row in enumerate(reader, start=1):
            features, target = row[:-1], row[-1]
            diagnosis = "M" if target == "0" else "B"
            out.write(",".join([str(row_number), diagnosis, *features]) + "\n")


if __name__ == "__main__":
    main()
