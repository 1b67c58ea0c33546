"""A/B benchmark of the numba and pure-numpy kernel paths.

The kernel module picks its path from VERTEX_EXPAND_NO_NUMBA at import
time, so this script re-runs itself in a subprocess for each path and
compares wall times plus result digests.

Usage: python benchmarks/bench_kernels.py [--nodes 1024] [--repeat 3]
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import time


def run_workload(nodes: int, repeat: int) -> dict:
    from vertex_expand import _kernels
    from vertex_expand.model import Boundary, ModelParams, enumerate_partition

    out: dict = {"numba": _kernels.NUMBA_ENABLED}

    params = ModelParams(beta_s=0.5, rows=2, cols=4,
                         boundary=Boundary.PERIODIC)
    enumerate_partition(params)  # warm the JIT before timing
    t0 = time.perf_counter()
    for _ in range(repeat):
        result = enumerate_partition(params)
    out["ice_scan_s"] = (time.perf_counter() - t0) / repeat
    out["ice_scan_z"] = f"{result.z:.17g}"

    a = math.cosh(1.0)
    _kernels.grid_sum(0, 64, a)
    t0 = time.perf_counter()
    for _ in range(repeat):
        total = _kernels.grid_sum(0, nodes, a)
    out["grid_sum_s"] = (time.perf_counter() - t0) / repeat
    out["grid_sum_value"] = f"{total:.17g}"
    return out


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--nodes", type=int, default=1024)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        print(json.dumps(run_workload(args.nodes, args.repeat)))
        return 0

    results = {}
    for label, no_numba in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, VERTEX_EXPAND_NO_NUMBA=no_numba)
        proc = subprocess.run(
            [sys.executable, __file__, "--child",
             "--nodes", str(args.nodes), "--repeat", str(args.repeat)],
            capture_output=True, text=True, env=env, check=True)
        results[label] = json.loads(proc.stdout)

    if results["numba"]["numba"]:
        for key in ("ice_scan_z", "grid_sum_value"):
            a, b = results["numba"][key], results["numpy"][key]
            status = "ok" if float(a) == float(b) or \
                abs(float(a) - float(b)) < 1e-9 * abs(float(a)) else "MISMATCH"
            print(f"{key}: {a} vs {b} [{status}]")
    else:
        print("numba unavailable; both runs used the numpy path")

    for key in ("ice_scan_s", "grid_sum_s"):
        fast, plain = results["numba"][key], results["numpy"][key]
        print(f"{key}: numba {fast * 1e3:.2f} ms, numpy {plain * 1e3:.2f} ms, "
              f"speedup {plain / fast:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
