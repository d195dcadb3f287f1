"""Analysis throughput on a synthetic tag file.

    python scripts/throughput.py --tags 10000000
"""
import argparse
import os
import tempfile
import time

import numpy as np

from antibunch.coincidence import analyze_stream
from antibunch.config import preset
from antibunch.detection import TAG_DTYPE
from antibunch.timetag import TagFileHeader, write_tags


def synthetic(path, n, seed=0, block=10**6):
    rng = np.random.default_rng(seed)

    def chunks():
        t_end = 0
        for i in range(0, n, block):
            m = min(block, n - i)
            t = t_end + np.cumsum(rng.exponential(50_000, m)).astype(np.uint64) // 50 * 50
            t_end = int(t[-1]) + 50
            out = np.empty(m, TAG_DTYPE)
            out["t"] = t
            out["channel"] = rng.integers(0, 3, m)
            yield out[np.lexsort((out["channel"], out["t"]))]

    return write_tags(path, TagFileHeader(50, 3), chunks())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tags", type=int, default=10**7)
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "bench.ptag")
        n = synthetic(path, args.tags)
        spec = preset("spacelike-paper").analysis_spec()
        t0 = time.perf_counter()
        sc = analyze_stream(path, spec)
        dt = time.perf_counter() - t0
    print(f"{n} tags in {dt:.2f} s: {n / dt / 1e6:.2f} M tags/s "
          f"(heralds {sc.n_heralds}, R_HA {sc.R_HA}, R_HB {sc.R_HB}, R_HAB {sc.R_HAB})")


if __name__ == "__main__":
    main()
