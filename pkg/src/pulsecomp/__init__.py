"""Composite pulse sequences for multi-qubit systematic-error compensation."""

from .pauli import (
    CommutatorClass,
    ExpressionError,
    Hamiltonian,
    PauliError,
    PauliString,
    PhasedPauli,
    commutator_class,
    commutator_times_minus_i,
    eta,
    multiply,
    parse_hamiltonian,
    su2_triple,
    unit_su2_partner,
)
from .unitary import (
    FidelityReport,
    Subspace,
    Unitary,
    UnitaryError,
    distance,
    evolve,
    fidelity,
    matrix_of,
    subspace_fidelity,
)
from .sequences import (
    CompileCache,
    CompileError,
    ErrorAssignment,
    Pulse,
    PulseSequence,
    SequenceError,
    bb1_j,
    bb1_w,
    bb1_wj,
    chain_labels,
    compile_sequence,
    phi_of,
    substitute,
    w_correction,
    wj_chain,
)
from .encoded import (
    Coupling,
    Encoding,
    SectorLabel,
    coupling_hamiltonian,
    exchange,
    get_encoding,
    heisenberg3_encoding,
    heisenberg_coupling,
    heisenberg_logical,
    p3_bb1,
    p3_sequence,
    sector_decomposition,
    xy3_encoding,
    xy_coupling,
)
from .analysis import (
    CrossoverReport,
    INFIDELITY_FLOOR,
    SlopeFit,
    SweepResult,
    SweepRow,
    crossover_power,
    fit_slope,
    fit_sweep,
    infidelity_of,
    local_slope,
    locate_crossover,
    magnus_m3,
    magnus_residual,
    random_sign_assignment,
    sweep,
)

__version__ = "0.1.0"
