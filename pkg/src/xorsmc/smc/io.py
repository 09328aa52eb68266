"""JSON instance files.

Shape::

    {
      "n": 2, "k": 1,
      "phi": <circuit>,
      "terms": [{"y_size": 3, "q": 1, "f": <circuit>}],
      "params": {"eta": 0.2, "c": 2, "T": null, "seed": 7}     (optional)
    }

A ``<circuit>`` is one of

* ``{"cnf": [["x0", "-b0"], ["b0"]]}``: clauses over named literals,
  a leading ``-`` negates;
* ``{"gates": [{"id": "g1", "op": "and", "args": ["x0", "-y1"]}], "output": "g1"}``;
  ops are and, or, not, xor, implies, iff, const;
* ``{"const": true}``;
* ``{"dimacs": "p cnf ..."}`` or ``{"dimacs_file": "path"}`` (terms only):
  variables ``1..n`` are x0..x{n-1} and ``n+1..n+d`` are y0..y{d-1}.
"""

from __future__ import annotations

import json
import os
from typing import Any

from ..formula.circuit import Circuit, CircuitError
from ..formula.cnf import CnfFormula, FormulaError
from .instance import CountingTerm, InstanceError, SmcInstance
from .params import SolveParams


def _circuit(spec: Any, where: str, n: int, d: int | None, base: str) -> Circuit:
    if not isinstance(spec, dict):
        raise InstanceError(f"{where}: expected an object")
    try:
        if "const" in spec:
            c = Circuit()
            return c.set_output(c.const(bool(spec["const"])))
        if "cnf" in spec:
            clauses = spec["cnf"]
            if not isinstance(clauses, list) or not all(isinstance(cl, list) for cl in clauses):
                raise InstanceError(f"{where}.cnf: expected a list of clauses")
            return Circuit.from_cnf(clauses)
        if "gates" in spec:
            if "output" not in spec:
                raise InstanceError(f"{where}: gate list without 'output'")
            return Circuit.from_gates(spec["gates"], spec["output"])
        if "dimacs" in spec or "dimacs_file" in spec:
            if d is None:
                raise InstanceError(f"{where}: DIMACS bodies are only supported for terms")
            text = spec.get("dimacs")
            if text is None:
                path = os.path.join(base, spec["dimacs_file"])
                with open(path) as fh:
                    text = fh.read()
            try:
                return dimacs_term(CnfFormula.from_dimacs(text), n, d)
            except InstanceError as exc:
                raise InstanceError(f"{where}: {exc}") from None
    except (CircuitError, FormulaError, OSError) as exc:
        raise InstanceError(f"{where}: {exc}") from None
    raise InstanceError(f"{where}: expected one of cnf, gates, const, dimacs, dimacs_file")


def dimacs_term(cnf: CnfFormula, n: int, d: int) -> Circuit:
    """Circuit for a DIMACS body whose variables map to x (first n) then y (next d)."""
    if cnf.num_vars > n + d:
        raise InstanceError(
            f"DIMACS term declares {cnf.num_vars} variables but only n + |y| = {n + d} are named")

    def name(lit: int) -> str:
        v = abs(lit)
        base = f"x{v - 1}" if v <= n else f"y{v - n - 1}"
        return base if lit > 0 else "-" + base

    return Circuit.from_cnf([[name(l) for l in cl] for cl in cnf.clauses])


def _int(obj: dict, key: str, where: str, default=None) -> int:
    val = obj.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int):
        raise InstanceError(f"{where}.{key}: expected an integer, got {val!r}")
    return val


def instance_from_dict(doc: dict, base: str = ".") -> tuple[SmcInstance, dict]:
    """Parse an instance document; returns the instance and its raw ``params`` block."""
    if not isinstance(doc, dict):
        raise InstanceError("instance: expected a JSON object")
    n = _int(doc, "n", "instance")
    terms_doc = doc.get("terms")
    if not isinstance(terms_doc, list):
        raise InstanceError("instance.terms: expected a list")
    k = _int(doc, "k", "instance", len(terms_doc))
    terms = []
    for i, t in enumerate(terms_doc):
        where = f"terms[{i}]"
        if not isinstance(t, dict):
            raise InstanceError(f"{where}: expected an object")
        d = _int(t, "y_size", where)
        q = _int(t, "q", where)
        f = _circuit(t.get("f"), f"{where}.f", n, d, base)
        try:
            terms.append(CountingTerm(f, d, q))
        except InstanceError as exc:
            raise InstanceError(f"{where}: {exc}") from None
    phi = _circuit(doc.get("phi"), "phi", n, None, base)
    inst = SmcInstance(n, k, phi, tuple(terms))
    params = doc.get("params") or {}
    if not isinstance(params, dict):
        raise InstanceError("params: expected an object")
    return inst, params


def load_instance(path: str) -> tuple[SmcInstance, dict]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc, os.path.dirname(os.path.abspath(path)))


def params_from_dict(raw: dict, **overrides) -> SolveParams:
    """Merge a ``params`` block with non-None overrides (eta, c, T, seed)."""
    merged = {"eta": raw.get("eta"), "c": raw.get("c"), "T": raw.get("T"), "seed": raw.get("seed")}
    merged.update({k: v for k, v in overrides.items() if v is not None})
    kwargs = {}
    if merged["eta"] is not None:
        kwargs["eta"] = float(merged["eta"])
    if merged["c"] is not None:
        kwargs["c"] = int(merged["c"])
    if merged["T"] is not None:
        kwargs["T_override"] = int(merged["T"])
    if merged["seed"] is not None:
        kwargs["seed"] = int(merged["seed"])
    return SolveParams(**kwargs)


def instance_to_dict(inst: SmcInstance, params: SolveParams | None = None) -> dict:
    doc = {
        "n": inst.n, "k": inst.k, "phi": inst.phi.to_gates(),
        "terms": [{"y_size": t.y_size, "q": t.q, "f": t.f.to_gates()} for t in inst.terms],
    }
    if params is not None:
        doc["params"] = {"eta": params.eta, "c": params.c, "T": params.T_override,
                         "seed": params.seed}
    return doc
