from .exact import (BruteResult, CapExceeded, count_circuit, count_exact,
                    smc_brute_force, term_counts)
from .sat import (OracleConfig, OracleError, ProtocolError, SatResult, Timeout,
                  parse_solver_output, solve)

__all__ = [
    "BruteResult", "CapExceeded", "count_circuit", "count_exact", "smc_brute_force",
    "term_counts", "OracleConfig", "OracleError", "ProtocolError", "SatResult",
    "Timeout", "parse_solver_output", "solve",
]
