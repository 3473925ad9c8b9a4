# Copyright 2026 The TLE Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Wide-band PESQ scorer used by `tle evaluate`.

Reads "id<TAB>reference<TAB>degraded" lines on stdin. Both files hold raw
float64 samples at 16 kHz. Prints "id<TAB>score" per line, or "nan" when a
pair cannot be scored.
"""

import sys

import numpy as np


def main() -> int:
    try:
        from pesq import pesq
    except ImportError:
        print("python package 'pesq' is not installed", file=sys.stderr)
        return 3
    if "--check" in sys.argv[1:]:
        return 0
    for line in sys.stdin:
        line = line.rstrip("\n")
        if not line:
            continue
        ident, ref_path, deg_path = line.split("\t")
        ref = np.fromfile(ref_path, dtype="<f8")
        deg = np.fromfile(deg_path, dtype="<f8")
        try:
            score = pesq(16000, ref, deg, "wb")
        except Exception as exc:  # the backend raises several unrelated types
            print(f"{ident}: {exc}", file=sys.stderr)
            score = float("nan")
        print(f"{ident}\t{score!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
