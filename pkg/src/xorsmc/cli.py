"""Command-line front end.

Exit codes: 10 TRUE / solution found, 20 FALSE, 30 infeasible, 1 error,
2 usage error.  Nothing exits 0 with an undecided result.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

EXIT_TRUE = 10
EXIT_FALSE = 20
EXIT_INFEASIBLE = 30
EXIT_ERROR = 1
T_WARN = 64


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--eta", type=float, help="failure probability bound (default 0.1)")
    g.add_argument("--c", type=int, help="slack exponent; raised to ceil(log2(k+1))+1 if lower")
    g.add_argument("--T", type=int, help="override the number of repetitions")
    g.add_argument("--seed", type=int, help="hash seed (default 0)")
    g.add_argument("--alpha-form", choices=("expanded", "kl"), default=None,
                   help="closed form used for T (default expanded)")
    g.add_argument("--oracle", metavar="PATH", help="external DIMACS solver (default: embedded, "
                   "or $XORSMC_ORACLE)")
    g.add_argument("--oracle-args", default="", help="extra arguments for the external solver")
    g.add_argument("--time-limit", type=float, help="per oracle call, seconds")
    g.add_argument("--emit-cnf", metavar="FILE", help="write the final compiled CNF as DIMACS")
    g.add_argument("--json", action="store_true", help="print the report as JSON")
    g.add_argument("--timing", action="store_true", help="include wall-clock times in the report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xorsmc", description="Satisfiability modulo counting "
                                 "by XOR hashing and SAT.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="decide an SMC instance file")
    p.add_argument("instance")
    p.add_argument("--verify", action="store_true", help="exactly recount active terms")
    _common(p)

    p = sub.add_parser("count", help="hashed test of 'count >= 2^q' for a DIMACS file")
    p.add_argument("cnf")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--vars", type=int, help="count over variables 1..VARS (default: all)")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", metavar="PATH")
    p.add_argument("--oracle-args", default="")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("shelter", help="shelter placement on an edge-list graph")
    p.add_argument("graph")
    p.add_argument("--m", type=int, help="override the shelter budget")
    p.add_argument("--q-lo", type=int)
    p.add_argument("--q-hi", type=int)
    p.add_argument("--baseline", action="store_true", help="also run the local-search baseline")
    p.add_argument("--jobs", type=int, default=1, help="parallel threshold probes")
    _common(p)

    p = sub.add_parser("supply", help="supply-chain design on a JSON network")
    p.add_argument("network")
    p.add_argument("--l", type=int, default=4, help="discretization bits")
    p.add_argument("--baseline", action="store_true", help="also draw a random feasible plan")
    p.add_argument("--jobs", type=int, default=1, help="parallel threshold probes")
    _common(p)
    return ap


def _oracle(args):
    from .oracle.sat import OracleConfig

    if args.oracle:
        return OracleConfig.external(args.oracle, args.oracle_args, args.time_limit)
    return OracleConfig.from_env(args.time_limit)


def _params(args, raw: dict | None = None):
    from .smc.io import params_from_dict

    params = params_from_dict(raw or {}, eta=args.eta, c=args.c, T=args.T, seed=args.seed)
    if args.alpha_form:
        from dataclasses import replace
        params = replace(params, alpha_form=args.alpha_form)
    return params


def _warn_T(T: int, c: int) -> None:
    if T > T_WARN:
        print(f"warning: T = {T} repetitions; raising --c above {c} shrinks T", file=sys.stderr)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ":".join(map(str, k)): _jsonable(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(report: dict, args) -> None:
    if not getattr(args, "timing", False):
        report.get("oracle", {}).pop("seconds", None)
    if args.json:
        print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
        return
    def walk(prefix, obj):
        for k, v in obj.items():
            if isinstance(v, dict):
                walk(f"{prefix}{k}.", v)
            else:
                print(f"{prefix}{k}: {_fmt(v)}")

    print(report["result"])
    walk("", {k: v for k, v in report.items() if k != "result"})


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, Fraction):
        return str(v) if v.denominator == 1 else f"{v} (~{float(v):.6g})"
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v) if v else "-"
    return str(v)


def _write_cnf(path: str, cnf) -> None:
    with open(path, "w") as fh:
        fh.write(cnf.to_dimacs())


def _solver_block(diag: dict, calls: int, seconds: float | None = None) -> dict:
    out = {"calls": calls, "vars": diag["num_vars"], "clauses": diag["num_clauses"],
           "backend": diag.get("oracle", {}).get("backend")}
    if seconds is not None:
        out["seconds"] = seconds
    return out


def _params_block(diag: dict, params) -> dict:
    return {"eta": params.eta, "c": diag["c"], "T": diag["T"], "majority": diag["majority"],
            "seed": params.seed, "alpha": diag["alpha"], "alpha_form": params.alpha_form}


def cmd_check(args) -> int:
    from .smc.io import load_instance
    from .smc.solver import xor_smc

    inst, raw = load_instance(args.instance)
    params = _params(args, raw)
    T, c, _ = params.resolve(inst.n, inst.k)
    _warn_T(T, c)
    d = xor_smc(inst, params, _oracle(args), verify=args.verify, keep_formula=bool(args.emit_cnf))
    if args.emit_cnf:
        _write_cnf(args.emit_cnf, d.formula)
    diag = d.diagnostics
    report = {
        "result": "TRUE" if d.answer else "FALSE",
        "answer": d.answer,
        "witness": {"x": list(d.x), "b": list(d.b)} if d.answer else None,
        "params": _params_block(diag, params),
        "oracle": _solver_block(diag, 1, diag["build_seconds"] + diag["solve_seconds"]),
    }
    if d.answer:
        report["guards_on"] = diag["guards_on"]
    if "verify" in diag:
        report["verify"] = diag["verify"]
    if report["witness"] is None:
        del report["witness"]
    _emit(report, args)
    return EXIT_TRUE if d.answer else EXIT_FALSE


def cmd_count(args) -> int:
    from .formula.cnf import CnfFormula
    from .oracle.sat import solve
    from .smc.params import majority
    from .xorhash import HashRng, encode_parity, sample_parity

    with open(args.cnf) as fh:
        base = CnfFormula.from_dimacs(fh.read())
    nvars = base.num_vars if args.vars is None else args.vars
    if not 0 < nvars <= base.num_vars:
        raise ValueError(f"--vars must lie in [1, {base.num_vars}]")
    if not 0 <= args.q <= nvars:
        raise ValueError(f"q={args.q} outside [0, {nvars}]: 2^q exceeds 2^{nvars} assignments")
    if args.repeats < 1:
        raise ValueError("--repeats must be positive")
    oracle = _oracle(args)
    votes = []
    for r in range(args.repeats):
        cnf = base.copy()
        rng = HashRng(args.seed).child(r)
        for j in range(args.q):
            encode_parity(cnf, sample_parity(range(1, nvars + 1), rng.child(j)))
        votes.append(solve(cnf, oracle).satisfiable)
    verdict = sum(votes) >= majority(args.repeats)
    report = {
        "result": f"count >= 2^{args.q}: {'TRUE' if verdict else 'FALSE'}",
        "verdict": verdict,
        "votes": [int(v) for v in votes],
        "q": args.q, "vars": nvars, "seed": args.seed, "repeats": args.repeats,
    }
    _emit(report, args)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_shelter(args) -> int:
    from .apps.shelter import (Infeasible, evaluate_assignment, local_search_baseline,
                               parse_graph, solve_shelter)
    from .smc.solver import build_xor_smc_formula

    with open(args.graph) as fh:
        graph = parse_graph(fh.read())
    if args.m is not None:
        from .apps.shelter import RoadGraph
        graph = RoadGraph(graph.nodes, graph.edges, graph.residential, args.m, graph.candidates)
    params = _params(args)
    q_range = None
    if args.q_lo is not None or args.q_hi is not None:
        q_range = (args.q_lo or 0, args.q_hi if args.q_hi is not None else len(graph.edges))
    T, c, _ = params.resolve(len(graph.nodes), len(graph.residential))
    _warn_T(T, c)
    try:
        res = solve_shelter(graph, params, _oracle(args), q_range, jobs=args.jobs)
    except Infeasible as exc:
        _emit({"result": "INFEASIBLE", "reason": str(exc)}, args)
        return EXIT_INFEASIBLE
    if args.emit_cnf:
        _write_cnf(args.emit_cnf, build_xor_smc_formula(res.instance, params))
    diag = res.decision.diagnostics
    report = {
        "result": "FOUND",
        "shelters": res.shelters,
        "q": res.q,
        "paths": res.paths,
        "paths_per_residential": res.per_residential,
        "probes": [f"{q}:{int(a)}" for q, a in res.probes],
        "params": _params_block(diag, params),
        "oracle": _solver_block(diag, len(res.probes)),
    }
    if args.baseline:
        seed = params.seed
        base = sorted(local_search_baseline(graph, graph.budget, random.Random(seed)))
        report["baseline"] = {"shelters": base, "paths": evaluate_assignment(graph, base)}
    _emit(report, args)
    return EXIT_TRUE


def cmd_supply(args) -> int:
    from .apps.supply import (Infeasible, evaluate_plan, load_network, random_feasible_plan,
                              solve_supply)
    from .smc.solver import build_xor_smc_formula

    net = load_network(args.network)
    params = _params(args)
    try:
        res = solve_supply(net, params, _oracle(args), l=args.l, jobs=args.jobs)
    except Infeasible as exc:
        _emit({"result": "INFEASIBLE", "reason": str(exc)}, args)
        return EXIT_INFEASIBLE
    if args.emit_cnf:
        _write_cnf(args.emit_cnf, build_xor_smc_formula(res.instance, params))
    diag = res.decision.diagnostics
    _warn_T(diag["T"], diag["c"])
    report = {
        "result": "FOUND",
        "plan": [f"{u}->{v}" for (u, v), bit in zip(net.edges, res.plan) if bit],
        "expectation": res.value,
        "q": {f"{v}:{d}": q for (v, d), q in res.q.items()},
        "terms": {f"{t['v']}:{t['d']}": {"expectation": t["expectation"], "scale": t["scale"],
                                         "scaled_count": t["scaled_count"], "upper": t["upper"],
                                         "count_q": t["count_q"]} for t in res.terms},
        "probes": [f"{q}:{int(a)}" for q, a in res.probes],
        "params": _params_block(diag, params),
        "oracle": _solver_block(diag, len(res.probes)),
    }
    if args.baseline:
        base = random_feasible_plan(net, random.Random(params.seed))
        report["baseline"] = {"plan": [f"{u}->{v}" for (u, v), bit in zip(net.edges, base) if bit],
                              "expectation": evaluate_plan(net, base)}
    _emit(report, args)
    return EXIT_TRUE


COMMANDS = {"check": cmd_check, "count": cmd_count, "shelter": cmd_shelter, "supply": cmd_supply}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
