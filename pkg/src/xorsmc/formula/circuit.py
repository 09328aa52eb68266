"""Boolean circuits over named inputs.

A :class:`Circuit` is a gate list; a node id is the gate's position.  The
builder methods fold constants and share structurally equal gates, and
always reference existing nodes, so circuits built through them are
acyclic by construction.  :meth:`Circuit.from_gates` accepts arbitrary
named gate lists (e.g. from instance files) and rejects cycles.

Input names are arbitrary hashables.  By convention instances use strings
such as ``"x0"``, ``"b1"``, ``"y3"``; CNF-level encoders use signed ints,
which :func:`~xorsmc.formula.encoders.tseitin` treats as literals.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np


class CircuitError(ValueError):
    pass


OPS = ("input", "const", "not", "and", "or", "xor")


class Circuit:
    def __init__(self) -> None:
        self.gates: list[tuple[str, tuple]] = []
        self.output: int | None = None
        self._inputs: dict[Hashable, int] = {}
        self._memo: dict[tuple, int] = {}

    def __len__(self) -> int:
        return len(self.gates)

    def _add(self, op: str, args: tuple) -> int:
        key = (op, args)
        node = self._memo.get(key)
        if node is None:
            node = len(self.gates)
            self.gates.append((op, args))
            self._memo[key] = node
        return node

    def _check(self, a: int) -> int:
        if not 0 <= a < len(self.gates):
            raise CircuitError(f"unknown node {a}")
        return a

    def _const_value(self, a: int):
        op, args = self.gates[a]
        return args[0] if op == "const" else None

    # -- leaves -----------------------------------------------------------------
    def input(self, name: Hashable) -> int:
        node = self._inputs.get(name)
        if node is None:
            node = self._add("input", (name,))
            self._inputs[name] = node
        return node

    def lit(self, lit: int) -> int:
        """Input node for a signed-int literal (negation becomes a NOT gate)."""
        node = self.input(abs(lit))
        return self.not_(node) if lit < 0 else node

    def const(self, value: bool) -> int:
        return self._add("const", (bool(value),))

    @property
    def inputs(self) -> list:
        return list(self._inputs)

    # -- gates ------------------------------------------------------------------
    def not_(self, a: int) -> int:
        self._check(a)
        op, args = self.gates[a]
        if op == "const":
            return self.const(not args[0])
        if op == "not":
            return args[0]
        return self._add("not", (a,))

    def _complement(self, a: int) -> int | None:
        op, args = self.gates[a]
        if op == "not":
            return args[0]
        return self._memo.get(("not", (a,)))

    def _nary(self, op: str, args: Iterable[int]) -> int:
        absorbing = op == "or"   # or: True absorbs; and: False absorbs
        uniq: list[int] = []
        for a in args:
            self._check(a)
            val = self._const_value(a)
            if val is not None:
                if val == absorbing:
                    return self.const(absorbing)
                continue
            if a not in uniq:
                uniq.append(a)
        present = set(uniq)
        for a in uniq:
            comp = self._complement(a)
            if comp is not None and comp in present:
                return self.const(absorbing)
        if not uniq:
            return self.const(not absorbing)
        if len(uniq) == 1:
            return uniq[0]
        return self._add(op, tuple(sorted(uniq)))

    def and_(self, *args: int) -> int:
        return self._nary("and", args)

    def or_(self, *args: int) -> int:
        return self._nary("or", args)

    def xor(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        va, vb = self._const_value(a), self._const_value(b)
        if va is not None:
            return self.not_(b) if va else b
        if vb is not None:
            return self.not_(a) if vb else a
        if a == b:
            return self.const(False)
        if self._complement(a) == b:
            return self.const(True)
        return self._add("xor", (min(a, b), max(a, b)))

    def iff(self, a: int, b: int) -> int:
        return self.not_(self.xor(a, b))

    def implies(self, a: int, b: int) -> int:
        return self.or_(self.not_(a), b)

    def set_output(self, node: int) -> "Circuit":
        self.output = self._check(node)
        return self

    # -- counting and arithmetic networks -------------------------------------
    def counter(self, nodes: Sequence[int], upto: int) -> list[int]:
        """Unary counter: element ``j`` is true iff at least ``j + 1`` of
        ``nodes`` are true, for ``j < upto``.  Each stage is a fully defined
        gate, so the Tseitin image stays parsimonious."""
        levels = [self.const(False)] * upto
        true = self.const(True)
        for x in nodes:
            prev = [true] + levels
            levels = [self.or_(levels[j], self.and_(x, prev[j])) for j in range(upto)]
        return levels

    def at_least(self, k: int, nodes: Sequence[int]) -> int:
        if k <= 0:
            return self.const(True)
        if k > len(nodes):
            return self.const(False)
        return self.counter(nodes, k)[k - 1]

    def at_most(self, k: int, nodes: Sequence[int]) -> int:
        if k >= len(nodes):
            return self.const(True)
        if k < 0:
            return self.const(False)
        if k == 0:
            return self.and_(*[self.not_(x) for x in nodes])
        return self.not_(self.counter(nodes, k + 1)[k])

    def exactly(self, k: int, nodes: Sequence[int]) -> int:
        if k < 0 or k > len(nodes):
            return self.const(False)
        levels = self.counter(nodes, min(k + 1, len(nodes)))
        lo = self.const(True) if k == 0 else levels[k - 1]
        hi = self.const(True) if k >= len(nodes) else self.not_(levels[k])
        return self.and_(lo, hi)

    def full_adder(self, a: int, b: int, c: int) -> tuple[int, int]:
        ab = self.xor(a, b)
        return self.xor(ab, c), self.or_(self.and_(a, b), self.and_(c, ab))

    def add_bits(self, xs: Sequence[int], ys: Sequence[int]) -> list[int]:
        """Ripple-carry sum of two little-endian bit vectors."""
        width = max(len(xs), len(ys))
        false = self.const(False)
        xs = list(xs) + [false] * (width - len(xs))
        ys = list(ys) + [false] * (width - len(ys))
        out = []
        carry = false
        for a, b in zip(xs, ys):
            s, carry = self.full_adder(a, b, carry)
            out.append(s)
        out.append(carry)
        return out

    def leq_const(self, bits: Sequence[int], bound: int) -> int:
        """Little-endian unsigned ``bits <= bound`` for a constant ``bound``."""
        if bound < 0:
            return self.const(False)
        if bound >= (1 << len(bits)):
            return self.const(True)
        le = self.const(True)
        for i, s in enumerate(bits):
            if (bound >> i) & 1:
                le = self.or_(self.not_(s), le)
            else:
                le = self.and_(self.not_(s), le)
        return le

    def pb_leq(self, terms: Sequence[tuple[int, int]], bound: int) -> int:
        """``sum(w * node) <= bound`` via an adder network."""
        if any(w < 0 for w, _ in terms):
            raise CircuitError("pseudo-Boolean weights must be nonnegative")
        if bound < 0:
            return self.const(False)
        if sum(w for w, _ in terms) <= bound:
            return self.const(True)
        false = self.const(False)
        acc: list[int] = []
        for w, node in terms:
            if w == 0:
                continue
            bits = [node if (w >> i) & 1 else false for i in range(w.bit_length())]
            acc = self.add_bits(acc, bits) if acc else bits
        return self.leq_const(acc, bound)

    # -- evaluation -------------------------------------------------------------
    def reachable(self, root: int | None = None) -> list[int]:
        """Node ids reachable from ``root`` (default: the output), ascending."""
        if root is None:
            root = self.output
        if root is None:
            raise CircuitError("circuit has no output")
        seen = {root}
        stack = [root]
        while stack:
            node = stack.pop()
            op, args = self.gates[node]
            if op in ("input", "const"):
                continue
            for a in args:
                if a not in seen:
                    seen.add(a)
                    stack.append(a)
        return sorted(seen)

    def evaluate(self, assignment: Mapping[Hashable, bool], node: int | None = None) -> bool:
        return bool(self.evaluate_batch(assignment, node))

    def evaluate_batch(self, columns: Mapping[Hashable, object], node: int | None = None):
        """Evaluate on numpy bool arrays (or scalars) keyed by input name.

        Arrays broadcast against each other, so fixed inputs may be scalars.
        """
        root = self.output if node is None else node
        order = self.reachable(root)
        vals: dict[int, object] = {}
        for n in order:
            op, args = self.gates[n]
            if op == "input":
                try:
                    vals[n] = np.asarray(columns[args[0]], dtype=bool)
                except KeyError:
                    raise CircuitError(f"no value for input {args[0]!r}") from None
            elif op == "const":
                vals[n] = np.bool_(args[0])
            elif op == "not":
                vals[n] = ~vals[args[0]]
            elif op == "and":
                v = vals[args[0]]
                for a in args[1:]:
                    v = v & vals[a]
                vals[n] = v
            elif op == "or":
                v = vals[args[0]]
                for a in args[1:]:
                    v = v | vals[a]
                vals[n] = v
            elif op == "xor":
                vals[n] = vals[args[0]] ^ vals[args[1]]
            else:
                raise CircuitError(f"unknown op {op!r}")
        return vals[root]

    # -- construction helpers ---------------------------------------------------
    @classmethod
    def from_cnf(cls, clauses: Iterable[Iterable[Hashable]]) -> "Circuit":
        """CNF over named literals; a leading ``-`` on a string negates it.

        Signed ints are treated as literals of integer-named inputs.
        """
        c = cls()
        ors = []
        for clause in clauses:
            ors.append(c.or_(*[c.named_literal(tok) for tok in clause]))
        return c.set_output(c.and_(*ors))

    def named_literal(self, tok: Hashable) -> int:
        if isinstance(tok, bool):
            return self.const(tok)
        if isinstance(tok, int):
            if tok == 0:
                raise CircuitError("literal 0 is not allowed")
            return self.lit(tok)
        if isinstance(tok, str) and tok.startswith("-"):
            return self.not_(self.input(tok[1:]))
        return self.input(tok)

    @classmethod
    def from_gates(cls, gates: Sequence[Mapping], output: str,
                   is_input=lambda name: True) -> "Circuit":
        """Build from ``[{"id": ..., "op": ..., "args": [...]}, ...]``.

        Arguments name gate ids or inputs (``-`` prefix negates); ``"true"``
        and ``"false"`` are constants.  Ops: and, or, not, xor, implies,
        iff, const.  Forward references are allowed; cycles are rejected.
        """
        table = {}
        for g in gates:
            gid = g.get("id")
            if gid is None or gid in table:
                raise CircuitError(f"gate with missing or duplicate id: {g!r}")
            table[gid] = g
        c = cls()
        built: dict[str, int] = {}
        visiting: set[str] = set()

        def ref(tok) -> int:
            if isinstance(tok, bool):
                return c.const(tok)
            if not isinstance(tok, str):
                raise CircuitError(f"bad gate argument {tok!r}")
            neg = tok.startswith("-")
            name = tok[1:] if neg else tok
            if name in ("true", "false"):
                node = c.const(name == "true")
            elif name in table:
                node = build(name)
            elif is_input(name):
                node = c.input(name)
            else:
                raise CircuitError(f"unknown gate or input {name!r}")
            return c.not_(node) if neg else node

        def build(gid: str) -> int:
            if gid in built:
                return built[gid]
            if gid in visiting:
                raise CircuitError(f"cyclic circuit through gate {gid!r}")
            visiting.add(gid)
            g = table[gid]
            op = g.get("op")
            args = [ref(a) for a in g.get("args", [])]
            if op == "and":
                node = c.and_(*args)
            elif op == "or":
                node = c.or_(*args)
            elif op == "not" and len(args) == 1:
                node = c.not_(args[0])
            elif op == "xor" and len(args) >= 1:
                node = args[0]
                for a in args[1:]:
                    node = c.xor(node, a)
            elif op == "implies" and len(args) == 2:
                node = c.implies(*args)
            elif op == "iff" and len(args) == 2:
                node = c.iff(*args)
            elif op == "const":
                node = c.const(bool(g.get("value")))
            else:
                raise CircuitError(f"gate {gid!r}: unsupported op {op!r} with {len(args)} args")
            visiting.discard(gid)
            built[gid] = node
            return node

        return c.set_output(ref(output))

    def to_gates(self) -> dict:
        """Inverse of :meth:`from_gates` for circuits with string input names."""
        names = {}
        gates = []
        for n in self.reachable():
            op, args = self.gates[n]
            if op == "input":
                names[n] = str(args[0])
            elif op == "const":
                names[n] = "true" if args[0] else "false"
            elif op == "not":
                names[n] = "-" + names[args[0]] if not names[args[0]].startswith("-") else names[args[0]][1:]
            else:
                gid = f"g{n}"
                gates.append({"id": gid, "op": op, "args": [names[a] for a in args]})
                names[n] = gid
        return {"gates": gates, "output": names[self.output]}
