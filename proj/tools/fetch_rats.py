#!/usr/bin/env python3
"""Fetch the survival::rats litter-matched tumorigenesis data as CSV.

The data (300 rats in 100 litters, columns litter, rx, time, status, sex) are
not redistributed with this repository. This script pulls the rdatasets 0.1.0
source distribution from the configured pip index, extracts the pickled
data frame and writes it as CSV, then checks the SHA-256 of the result.

    python3 tools/fetch_rats.py            # writes data/rats.csv
    python3 tools/fetch_rats.py --from-sdist rdatasets-0.1.0.tar.gz

Requires pandas.
"""

import argparse
import gzip
import hashlib
import io
import pathlib
import pickle
import subprocess
import sys
import tarfile
import tempfile

SHA256 = "2c41891d5f81c32b89f7e2bd73a1d859f7c43ac365511f5664ddb789e6116a69"
MEMBER = "rdatasets-0.1.0/rdatasets/_data/survival/rats.pkl.compress"


def download_sdist(dest: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "rdatasets==0.1.0", "--no-deps",
         "--no-binary", ":all:", "-d", str(dest)],
        check=True)
    found = sorted(dest.glob("rdatasets-0.1.0*.tar.gz"))
    if not found:
        sys.exit("error: rdatasets-0.1.0 source distribution not found after download")
    return found[0]


def extract_csv(sdist: pathlib.Path) -> bytes:
    with tarfile.open(sdist, "r:gz") as tar:
        raw = tar.extractfile(MEMBER).read()
    frame = pickle.load(io.BytesIO(gzip.decompress(raw)))
    return frame.to_csv(index=False).encode()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/rats.csv")
    parser.add_argument("--from-sdist", help="use an already downloaded rdatasets-0.1.0.tar.gz")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        sdist = pathlib.Path(args.from_sdist) if args.from_sdist else download_sdist(pathlib.Path(tmp))
        content = extract_csv(sdist)

    digest = hashlib.sha256(content).hexdigest()
    if digest != SHA256:
        print(f"warning: checksum {digest} differs from the expected {SHA256}", file=sys.stderr)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(content)
    rows = content.count(b"\n") - 1
    print(f"wrote {out} ({rows} rows, sha256 {digest})")
    return 0 if digest == SHA256 else 1


if __name__ == "__main__":
    sys.exit(main())
