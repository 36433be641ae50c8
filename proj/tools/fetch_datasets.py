#!/usr/bin/env python3
# Copyright 2026 The qkdist Authors
# SPDX-License-Identifier: Apache-2.0
"""Write the experiment datasets as CSV files under data/.

Wine and Digits come from the copies bundled with scikit-learn. Parkinson's
and the Framingham Heart Study are downloaded from their public mirrors; if a
download fails the file is skipped and the tests that need it report a skip.
"""

import argparse
import csv
import io
import sys
import urllib.request
from pathlib import Path

PARKINSONS_URLS = [
    "https://archive.ics.uci.edu/ml/machine-learning-databases/parkinsons/parkinsons.data",
    "https://archive.ics.uci.edu/static/public/174/parkinsons.zip",
]
FRAMINGHAM_URLS = [
    "https://raw.githubusercontent.com/GauravPadawe/Framingham-Heart-Study/master/framingham.csv",
    "https://raw.githubusercontent.com/TarekDib03/Analytics/master/Week3%20-%20Logistic%20Regression/Data/framingham.csv",
]


def write_sklearn(out: Path) -> None:
    from sklearn.datasets import load_digits, load_wine

    for name, loader in (("wine", load_wine), ("digits", load_digits)):
        path = out / f"{name}.csv"
        if path.exists():
            print(f"{path} exists, skipping")
            continue
        bunch = loader()
        label = "class" if name == "wine" else "target"
        header = [f.replace("/", "_") for f in bunch.feature_names] + [label]
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row, y in zip(bunch.data, bunch.target):
                w.writerow([repr(float(v)) for v in row] + [int(y)])
        print(f"wrote {path} ({len(bunch.target)} rows)")


def fetch(urls, timeout):
    for url in urls:
        try:
            with urllib.request.urlopen(url, timeout=timeout) as resp:
                data = resp.read()
        except OSError as exc:
            print(f"  {url}: {exc}", file=sys.stderr)
            continue
        if url.endswith(".zip"):
            import zipfile

            with zipfile.ZipFile(io.BytesIO(data)) as zf:
                member = next(n for n in zf.namelist() if n.endswith(".data"))
                data = zf.read(member)
        return data
    return None


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--timeout", type=float, default=10.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_sklearn(out)

    missing = []
    for name, urls in (("parkinsons", PARKINSONS_URLS), ("framingham", FRAMINGHAM_URLS)):
        path = out / f"{name}.csv"
        if path.exists():
            print(f"{path} exists, skipping")
            continue
        data = fetch(urls, args.timeout)
        if data is None:
            missing.append(name)
            continue
        path.write_bytes(data)
        print(f"wrote {path}")
    if missing:
        print("could not download: " + ", ".join(missing) + "; place the CSV files in "
              f"{out} by hand (see docs/formats.md)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
