"""Satisfiability of modal circuits and formulas over restricted Boolean bases."""

from __future__ import annotations

from .boolfn import (
    AND,
    CONST0,
    CONST1,
    NOT,
    OR,
    XOR,
    Base,
    FunctionTable,
    clone_contains,
    clone_profile,
    find_implementation,
    identify_clone,
    parse_base,
)
from .circuit import BOX, DIA, E, CircuitBuilder, Gate, ModalCircuit
from .classify import ComplexityVerdict, Instance, classify, classify_base
from .errors import (
    CircuitError,
    ModsatError,
    NotInCloneError,
    ParseError,
    PreconditionError,
    ResourceError,
    SearchExhaustedError,
    UnsupportedFrameError,
)
from .kripke import FRAMES, KripkeModel, brute_force_sat, brute_force_valid, frame_in_class, holds, oracle_equivalent
from .parsing import parse_circuit, parse_formula, parse_netlist
from .polysolve import (
    sat_and_recursion,
    sat_monotone_serial,
    sat_monotone_single_op,
    sat_or_recursion,
    sat_r1_or_d,
    sat_unary_chain,
    sat_xor,
)
from .reductions import circuit_to_formula, eliminate_box, eliminate_dia, kd_to_k, rewrite_base, s1_transform
from .tableau import choose_engine, ksat_tableau, solve, verify_witness
from .verdict import Verdict
from .xorsat import canonical_key, equivalence_key, xor_equivalent, xor_minimize, xor_normalize, xor_sat

__version__ = "0.1.0"

__all__ = [n for n in dir() if not n.startswith("_") and n != "annotations"]
