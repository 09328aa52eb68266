from .instance import CountingTerm, InstanceError, SmcInstance, bs, xs, ys
from .io import instance_from_dict, instance_to_dict, load_instance, params_from_dict
from .params import (ParameterError, SolveParams, alpha, compute_T, majority, min_admissible_c,
                     min_c)
from .solver import (ConsistencyError, Decision, ThresholdResult, build_xor_smc_formula,
                     hashed_formula, maximize_threshold, verify_witness, xor_binary, xor_smc)

__all__ = [
    "CountingTerm", "InstanceError", "SmcInstance", "bs", "xs", "ys",
    "instance_from_dict", "instance_to_dict", "load_instance", "params_from_dict",
    "ParameterError", "SolveParams", "alpha", "compute_T", "majority", "min_admissible_c",
    "min_c", "ConsistencyError", "Decision", "ThresholdResult", "build_xor_smc_formula",
    "hashed_formula", "maximize_threshold", "verify_witness", "xor_binary", "xor_smc",
]
