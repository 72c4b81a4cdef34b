#!/usr/bin/env python3
"""Concatenate the UCI Adult train/test files into one headered CSV.

adult.test starts with a "|1x3 Cross validator" banner and its labels carry a
trailing period ("<=50K."); both are normalised so the two files share one
label vocabulary. Missing values ("?") are left in place.
"""
import pathlib
import sys

HEADER = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]


def rows(path):
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("|"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if fields[-1].endswith("."):
            fields[-1] = fields[-1][:-1]
        yield fields


def main():
    here = pathlib.Path(__file__).resolve().parent
    out = here / "adult.csv"
    with out.open("w") as f:
        f.write(",".join(HEADER) + "\n")
        n = 0
        for name in ("adult.data", "adult.test"):
            for r in rows(here / name):
                assert len(r) == len(HEADER), r
                f.write(",".join(r) + "\n")
                n += 1
    print(f"wrote {out} ({n} rows)", file=sys.stderr)


if __name__ == "__main__":
    main()
