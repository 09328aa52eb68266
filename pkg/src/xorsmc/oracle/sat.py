"""SAT oracle adapters: the embedded CDCL kernel or an external DIMACS solver."""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .. import _kernels
from ..formula.cnf import CnfFormula

ENV_ORACLE = "XORSMC_ORACLE"


class OracleError(RuntimeError):
    pass


class Timeout(OracleError):
    """The oracle ran out of time.  Never to be read as UNSAT."""


class ProtocolError(OracleError):
    """External solver output could not be interpreted, or its model was wrong."""


@dataclass(frozen=True)
class OracleConfig:
    backend: str = "embedded"
    path: str | None = None
    args: tuple[str, ...] = ()
    time_limit: float | None = None

    def __post_init__(self) -> None:
        if self.backend not in ("embedded", "external"):
            raise ValueError(f"unknown oracle backend {self.backend!r}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    @classmethod
    def external(cls, path: str | None = None, args=(), time_limit=None) -> "OracleConfig":
        path = path or os.environ.get(ENV_ORACLE)
        if not path:
            raise ValueError(f"no external solver path given and ${ENV_ORACLE} is unset")
        if isinstance(args, str):
            args = shlex.split(args)
        return cls("external", path, tuple(args), time_limit)

    @classmethod
    def from_env(cls, time_limit=None) -> "OracleConfig":
        """External solver from ``$XORSMC_ORACLE`` if set, else embedded."""
        if os.environ.get(ENV_ORACLE):
            return cls.external(time_limit=time_limit)
        return cls(time_limit=time_limit)


@dataclass
class SatResult:
    satisfiable: bool
    model: list[int] | None = None
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "SATISFIABLE" if self.satisfiable else "UNSATISFIABLE"

    def value(self, lit: int) -> bool:
        if self.model is None:
            raise ValueError("no model for an unsatisfiable result")
        bit = self.model[abs(lit) - 1] == 1
        return bit if lit > 0 else not bit


def solve(cnf: CnfFormula, config: OracleConfig | None = None) -> SatResult:
    """Decide ``cnf``; a returned model is checked against every clause."""
    config = config or OracleConfig()
    start = time.perf_counter()
    if config.backend == "embedded":
        deadline = start + config.time_limit if config.time_limit else 0.0
        status, model, conflicts = _kernels.solve_cnf(cnf.num_vars, cnf.clauses, deadline)
        if status == _kernels.UNKNOWN:
            raise Timeout(f"embedded solver exceeded {config.time_limit}s")
        stats = {"conflicts": conflicts, "backend": _kernels.BACKEND}
        sat = status == _kernels.SAT
    else:
        sat, model = _solve_external(cnf, config)
        stats = {"backend": "external"}
    res = SatResult(sat, model if sat else None, time.perf_counter() - start, stats)
    if sat:
        if res.model is None or len(res.model) != cnf.num_vars:
            raise ProtocolError("satisfiable answer without a complete model")
        if not cnf.is_satisfied_by(res.model):
            raise ProtocolError("oracle model violates the formula")
    return res


def parse_solver_output(text: str, num_vars: int, returncode: int | None = None):
    """Read ``s``/``v`` lines; fall back to exit codes 10/20 without a status line."""
    status = None
    values: dict[int, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = True
            elif word == "UNSATISFIABLE":
                status = False
            elif word.startswith("UNKNOWN"):
                raise Timeout("external solver reported UNKNOWN")
            else:
                raise ProtocolError(f"unrecognised status line {line!r}")
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise ProtocolError(f"bad value token {tok!r}") from None
                if lit != 0:
                    if abs(lit) > num_vars:
                        raise ProtocolError(f"value for unknown variable {abs(lit)}")
                    values[abs(lit)] = int(lit > 0)
    if status is None:
        if returncode == 10:
            status = True
        elif returncode == 20:
            status = False
        else:
            raise ProtocolError("external solver printed no status line")
    if returncode in (10, 20) and status != (returncode == 10):
        raise ProtocolError("exit code contradicts status line")
    if not status:
        return False, None
    return True, [values.get(v, 0) for v in range(1, num_vars + 1)]


def _solve_external(cnf: CnfFormula, config: OracleConfig):
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        fh.write(cnf.to_dimacs())
        path = fh.name
    try:
        try:
            proc = subprocess.run([config.path, *config.args, path], capture_output=True,
                                  text=True, timeout=config.time_limit)
        except subprocess.TimeoutExpired:
            raise Timeout(f"external solver exceeded {config.time_limit}s") from None
        except OSError as exc:
            raise OracleError(f"cannot run external solver {config.path!r}: {exc}") from None
    finally:
        os.unlink(path)
    return parse_solver_output(proc.stdout, cnf.num_vars, proc.returncode)
