#!/usr/bin/env python3
"""Download and unpack TUDataset benchmarks (MUTAG, PROTEINS, ENZYMES, ...).

Usage:
    python3 tools/fetch_tudataset.py MUTAG PROTEINS --out data/

Creates data/<NAME>/<NAME>_A.txt etc., the layout `topohk` expects.
Requires network access; in offline environments use `topohk-synth` to
generate synthetic stand-ins instead.
"""

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

MIRROR = "https://www.chrsmrrs.com/graphkerneldatasets/{name}.zip"


def fetch(name: str, out_dir: Path) -> None:
    url = MIRROR.format(name=name)
    print(f"fetching {url}")
    with urllib.request.urlopen(url) as response:
        payload = response.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        archive.extractall(out_dir)
    target = out_dir / name
    if not (target / f"{name}_A.txt").exists():
        raise RuntimeError(f"unexpected archive layout for {name}")
    print(f"wrote {target}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("names", nargs="+", help="dataset names, e.g. MUTAG PROTEINS")
    parser.add_argument("--out", default="data", help="output directory (default: data)")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        fetch(name, out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
