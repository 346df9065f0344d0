#!/usr/bin/env python3
"""Convert USPS digits to the CSV layout the benchmark reads.

Accepts the LIBSVM text files (usps, usps.t, optionally .bz2; labels 1..10
stand for digits 0..9) or the usps.h5 archive with train/test groups. All
given files are concatenated. Output rows: digit, then 256 pixel values.
"""
import argparse
import bz2
import csv
import sys


def read_libsvm(path):
    opener = bz2.open if path.endswith(".bz2") else open
    with opener(path, "rt") as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            digit = int(float(parts[0])) - 1
            pixels = [0.0] * 256
            for item in parts[1:]:
                idx, val = item.split(":")
                pixels[int(idx) - 1] = float(val)
            yield digit, pixels


def read_h5(path):
    import h5py

    with h5py.File(path, "r") as f:
        for split in ("train", "test"):
            if split not in f:
                continue
            data, target = f[split]["data"][:], f[split]["target"][:]
            for row, digit in zip(data, target):
                yield int(digit), [float(v) for v in row]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("inputs", nargs="+", help="LIBSVM files (.bz2 ok) or usps.h5")
    ap.add_argument("-o", "--out", required=True, help="output CSV")
    args = ap.parse_args()

    rows = 0
    with open(args.out, "w", newline="") as out:
        w = csv.writer(out)
        for path in args.inputs:
            reader = read_h5 if path.endswith((".h5", ".hdf5")) else read_libsvm
            for digit, pixels in reader(path):
                if len(pixels) != 256 or not 0 <= digit <= 9:
                    sys.exit(f"{path}: unexpected record (digit {digit}, {len(pixels)} values)")
                w.writerow([digit] + [repr(v) for v in pixels])
                rows += 1
    print(f"wrote {rows} rows to {args.out}")


if __name__ == "__main__":
    main()
