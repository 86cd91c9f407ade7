"""Exact finite-depth Rokhlin theory on subshifts of finite type."""
from .scalars import FLOAT, RATIONAL, LogSum
from .symbolic import (Alphabet, CylinderSet, SymbolicSystem, coordinate_set, cylinder, full_shift,
                       make_system, shift)
from .measures import (bernoulli, check_invariance, markov_measure, rn_decompose, rn_derivative,
                       stationary_distribution, table_measure)
from .partitions import (Partition, invariant_hull, join, meet, point_partition, refines,
                         symbol_partition, trivial_partition)
from .rokhlin import coordinate_generators, lex_offset, peano_point, phi_mw, rho_map, square_chart
from .conditional import cond_information, condition, fubini_check
from .entropy import (conditional_entropy, entropy_identity_check, entropy_rate, information,
                      pinsker_sft, tail_zero_entropy_check)
from .toral import lyapunov, pesin_check, ruelle_check, toral_automorphism

__version__ = "0.1.0"

__all__ = [
    "FLOAT",
    "RATIONAL",
    "LogSum",
    "Alphabet",
    "CylinderSet",
    "SymbolicSystem",
    "coordinate_set",
    "cylinder",
    "full_shift",
    "make_system",
    "shift",
    "bernoulli",
    "check_invariance",
    "markov_measure",
    "rn_decompose",
    "rn_derivative",
    "stationary_distribution",
    "table_measure",
    "Partition",
    "invariant_hull",
    "join",
    "meet",
    "point_partition",
    "refines",
    "symbol_partition",
    "trivial_partition",
    "coordinate_generators",
    "lex_offset",
    "peano_point",
    "phi_mw",
    "rho_map",
    "square_chart",
    "cond_information",
    "condition",
    "fubini_check",
    "conditional_entropy",
    "entropy_identity_check",
    "entropy_rate",
    "information",
    "pinsker_sft",
    "tail_zero_entropy_check",
    "lyapunov",
    "pesin_check",
    "ruelle_check",
    "toral_automorphism",
]
