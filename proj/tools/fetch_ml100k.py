#!/usr/bin/env python3
#
# Copyright 2026 The fedcia Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Fetches MovieLens-100k and writes it as data/ml-100k/u.data.

Tries the GroupLens archive first. When that host is unreachable, falls back
to the copy of the same ratings shipped inside the `recbole` wheel on PyPI
(recbole/dataset_example/ml-100k/ml-100k.inter, which is u.data plus a
typed header line).
"""

import argparse
import io
import pathlib
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

GROUPLENS_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
RECBOLE_MEMBER = "recbole/dataset_example/ml-100k/ml-100k.inter"


def from_grouplens() -> bytes:
    with urllib.request.urlopen(GROUPLENS_URL, timeout=20) as resp:
        archive = zipfile.ZipFile(io.BytesIO(resp.read()))
    return archive.read("ml-100k/u.data")


def from_recbole_wheel() -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--quiet",
             "-d", tmp, "recbole==1.2.1"],
            check=True)
        wheel = next(pathlib.Path(tmp).glob("recbole-*.whl"))
        lines = zipfile.ZipFile(wheel).read(RECBOLE_MEMBER).decode().splitlines()
    # Drop the "user_id:token\titem_id:token..." header.
    body = [ln for ln in lines[1:] if ln.strip()]
    return ("\n".join(body) + "\n").encode()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(
        pathlib.Path(__file__).resolve().parent.parent / "data" / "ml-100k" / "u.data"))
    args = parser.parse_args()

    out = pathlib.Path(args.out)
    if out.exists():
        print(f"{out} already present")
        return 0
    try:
        payload = from_grouplens()
        source = "grouplens"
    except Exception as err:  # noqa: BLE001
        print(f"grouplens unavailable ({err}); using recbole wheel", file=sys.stderr)
        payload = from_recbole_wheel()
        source = "recbole wheel"

    rows = payload.decode().splitlines()
    if len(rows) != 100000:
        print(f"unexpected row count {len(rows)}", file=sys.stderr)
        return 1
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(payload)
    print(f"wrote {out} ({len(rows)} ratings, from {source})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
