"""Time the compiled and pure-Python enumeration kernels on the same inputs.

    python3 benchmarks/bench_enumerate.py [--repeat 3] [--max-paths 20000]

Both backends are fed the identical encoded problem and must return identical
path lists; the script aborts if they disagree.
"""

from __future__ import annotations

import argparse
import json
import random
import statistics
import sys
import time
from pathlib import Path

from fiveg_ttp import _engine
from fiveg_ttp.attackgraph import _encode
from fiveg_ttp.kb import load_seed
from fiveg_ttp.topology import load_reference, parse_topology

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from conftest import random_topology_doc  # noqa: E402


def _time(enc, depth, max_paths, backend, repeat):
    samples, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = enc.run(depth, max_paths, backend)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples), result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-paths", type=int, default=20000)
    ap.add_argument("--random", type=int, default=5, help="number of random 8-asset topologies")
    args = ap.parse_args(argv)

    if "cython" not in _engine.available_backends():
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1

    kb = load_seed()
    cases = [("ref5gcn d8", load_reference(), 8), ("ref5gcn d5", load_reference(), 5)]
    rng = random.Random(0)
    for i in range(args.random):
        doc = random_topology_doc(rng, max_assets=8, edge_p=0.4)
        cases.append((f"random#{i} ({len(doc['assets'])} assets) d6", parse_topology(json.dumps(doc)), 6))

    print(f"{'case':<28}{'paths':>9}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for label, topo, depth in cases:
        enc = _encode(kb, topo)
        t_py, r_py = _time(enc, depth, args.max_paths, "python", args.repeat)
        t_cy, r_cy = _time(enc, depth, args.max_paths, "cython", args.repeat)
        if [list(p) for p in r_py[0]] != [list(p) for p in r_cy[0]] or r_py[1] != r_cy[1]:
            print(f"{label}: backends disagree", file=sys.stderr)
            return 2
        speedup = t_py / t_cy if t_cy > 0 else float("inf")
        print(f"{label:<28}{len(r_py[0]):>9}{t_py:>11.4f}{t_cy:>11.4f}{speedup:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
