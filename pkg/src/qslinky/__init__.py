"""Boson-cluster chains in the resonant extended Bose-Hubbard model.

Library layout mirrors the pipeline: `fock` builds occupation bases and
the interacting Hamiltonian, `effective` the single-cluster chains,
`bloch` the momentum-space families and Zak phases, `diagnostics` the
edge-state observables, `dynamics` the quench protocol, and `cli` ties
them into reproducible runs.
"""

from .bloch import (
    BandStructure,
    BlochFamily,
    band_structure,
    bloch_matrix,
    gap_edges,
    slinky_bloch_family,
    zak_phase,
)
from .diagnostics import (
    EdgeNumberCurve,
    EdgePair,
    SpectrumReport,
    chain_cutoffs,
    edge_boson_number,
    open_chain_spectrum,
    select_edge_states,
)
from .dynamics import (
    EdgeStateSelector,
    QuenchTrace,
    evolve,
    oscillation_frequency,
    prepare_initial_state,
)
from .effective import (
    EffectiveChain,
    build_effective_chain,
    dense_matrix,
    slinky_amplitudes,
)
from .errors import (
    BandTouching,
    DimensionOverflow,
    InvalidMu,
    LeakyRestriction,
    NoEdgeStates,
    NoOscillation,
    NormDriftExceeded,
    NotNormalized,
    QslinkyError,
    SolverFailure,
)
from .fock import (
    Basis,
    ModelParams,
    SparseHermitianOperator,
    build_hamiltonian,
    dimer_number_expectation,
    enumerate_full_basis,
    enumerate_truncated_basis,
    number_expectation,
    slinky_occupations,
)

__version__ = "0.1.0"
