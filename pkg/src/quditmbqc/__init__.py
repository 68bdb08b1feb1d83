"""Qudit MBQC toolkit: gate analysis, pattern compilation, dense verification."""

from .galois import (
    DimSpec,
    FINITE_FIELD,
    INTEGER_RING,
    make_dim,
)
from .pauli import PauliWord, match_pauli, matrix_of_pauli, weyl
from .gates import cx_gate, cz_gate, hadamard, mult_gate, sgate, shear_gate
from .sim import StateVector, measure, product_state
from .resource import (
    EntanglingGateSpec,
    IntrinsicGate,
    cx_spec,
    cz_spec,
    factor_block_controlled_pauli,
    factor_diagonal_clifford,
    intrinsic_of,
    light_shift_angle,
    light_shift_spec,
)
from .clifford import (
    CliffordCert,
    SymplecticRep,
    certify,
    hadamard_from_intrinsic,
    pauli_order,
    symplectic_of,
    universality_check,
)
from .compiler import (
    MeasurementPattern,
    PatternStep,
    compile_clifford,
    compile_unitary,
    transport_pattern,
)
from .engine import (
    PauliFrame,
    ResourceGraph,
    build,
    chain_graph,
    couple_input,
    entangle_via_edge,
    local_complement,
    mediator_step,
    run_pattern,
    vertex_delete,
)

__version__ = "0.1.0"
