#!/usr/bin/env python3
"""Merge the UCI Adult `adult.data` and `adult.test` files into one headered CSV.

Rows with a missing value ('?') are dropped and the trailing '.' of the test
labels is removed. An `origin` column records the source file.
"""
import argparse
import csv
import pathlib
import sys

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]


def rows(path, origin):
    with open(path, newline="") as f:
        for record in csv.reader(f, skipinitialspace=True):
            if len(record) != len(COLUMNS):
                continue  # blank lines and the test file's banner
            record = [cell.strip() for cell in record]
            if "?" in record:
                continue
            record[-1] = record[-1].rstrip(".")
            yield record + [origin]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("data_dir", type=pathlib.Path, help="directory holding adult.data and adult.test")
    parser.add_argument("output", type=pathlib.Path)
    args = parser.parse_args()
    count = 0
    with open(args.output, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(COLUMNS + ["origin"])
        for name, origin in (("adult.data", "train"), ("adult.test", "test")):
            for record in rows(args.data_dir / name, origin):
                writer.writerow(record)
                count += 1
    print(f"wrote {count} rows to {args.output}", file=sys.stderr)


if __name__ == "__main__":
    main()
