from .circuit import Circuit, CircuitError
from .cnf import CnfFormula, FormulaError, lit_key
from .encoders import (assert_circuit, encode_at_least_k, encode_at_most_k,
                       encode_exactly_k, encode_pb_leq, tseitin)

__all__ = [
    "Circuit", "CircuitError", "CnfFormula", "FormulaError", "lit_key",
    "assert_circuit", "encode_at_least_k", "encode_at_most_k", "encode_exactly_k",
    "encode_pb_leq", "tseitin",
]
