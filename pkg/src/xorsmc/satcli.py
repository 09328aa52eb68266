"""Minimal DIMACS solver front-end around the embedded CDCL kernel.

Prints ``s SATISFIABLE`` / ``s UNSATISFIABLE`` and ``v`` lines, and exits
with 10 / 20 like common SAT solvers.  Usable as an external oracle.
"""

from __future__ import annotations

import argparse
import sys
import time


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="xorsmc-sat", description=__doc__.splitlines()[0])
    ap.add_argument("cnf", help="DIMACS file ('-' for stdin)")
    ap.add_argument("--time-limit", type=float, default=None, help="seconds")
    args = ap.parse_args(argv)

    from ._kernels import SAT, UNSAT, solve_cnf
    from .formula.cnf import CnfFormula, FormulaError

    try:
        text = sys.stdin.read() if args.cnf == "-" else open(args.cnf).read()
        cnf = CnfFormula.from_dimacs(text)
    except (OSError, FormulaError) as exc:
        print(f"c error: {exc}", file=sys.stderr)
        return 1
    deadline = time.perf_counter() + args.time_limit if args.time_limit else 0.0
    status, model, _ = solve_cnf(cnf.num_vars, cnf.clauses, deadline)
    if status == SAT:
        print("s SATISFIABLE")
        lits = [v if model[v - 1] else -v for v in range(1, cnf.num_vars + 1)]
        for i in range(0, len(lits), 16):
            print("v " + " ".join(map(str, lits[i:i + 16])))
        print("v 0")
        return 10
    if status == UNSAT:
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return 0


if __name__ == "__main__":
    sys.exit(main())
