"""Compare the compiled and pure-Python kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--sat-vars 60] [--instances 20] [--repeat 3]

Workloads: random 3-SAT near the phase transition (CDCL), random XOR-hashed
formulas as built by the solver, and projected model counting.
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from xorsmc._kernels import backends
from xorsmc.formula.cnf import CnfFormula
from xorsmc.xorhash import HashRng, encode_parity, sample_parity


def random_3sat(rng: random.Random, n: int, ratio: float) -> list[list[int]]:
    out = []
    for _ in range(int(n * ratio)):
        vs = rng.sample(range(1, n + 1), 3)
        out.append([v if rng.random() < 0.5 else -v for v in vs])
    return out


def hashed(rng: random.Random, n: int, q: int, seed: int) -> tuple[int, list[list[int]]]:
    f = CnfFormula()
    f.new_vars(n)
    f.add_clauses(random_3sat(rng, n, 2.0))
    h = HashRng(seed)
    for j in range(q):
        encode_parity(f, sample_parity(range(1, n + 1), h.child(j)))
    return f.num_vars, f.clauses


def timed(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sat-vars", type=int, default=60)
    ap.add_argument("--count-vars", type=int, default=20)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    n = args.sat_vars
    workloads = {
        "3sat": [(n, random_3sat(rng, n, 4.26)) for _ in range(args.instances)],
        "xor": [hashed(rng, n, n // 4, i) for i in range(args.instances)],
    }
    m = args.count_vars
    counting = [(m, random_3sat(rng, m, 2.5)) for _ in range(args.instances)]

    mods = backends()
    if "compiled" not in mods:
        print("compiled backend unavailable; timing the Python kernel only")
    print(f"{'workload':<10}{'backend':<10}{'total s':>10}{'median ms':>12}{'speedup':>9}")
    for name, jobs in list(workloads.items()) + [("count", counting)]:
        rows, answers = {}, {}
        for bname, mod in mods.items():
            times, res = [], []
            for nv, clauses in jobs:
                if name == "count":
                    t, r = timed(lambda: mod.count_projected(nv, clauses, list(range(1, nv + 1))),
                                 args.repeat)
                else:
                    t, r = timed(lambda: mod.solve_cnf(nv, clauses)[0], args.repeat)
                times.append(t)
                res.append(r)
            rows[bname], answers[bname] = times, res
        if len(answers) == 2 and answers["compiled"] != answers["python"]:
            raise SystemExit(f"{name}: backends disagree")
        base = sum(rows["python"])
        for bname, times in rows.items():
            total = sum(times)
            print(f"{name:<10}{bname:<10}{total:>10.3f}{1000 * statistics.median(times):>12.2f}"
                  f"{base / total:>8.1f}x")


if __name__ == "__main__":
    main()
