"""Cyclic-permutation gates X_d and X_d(p) for OAM photonic qudits."""

from .elements import (
    BeamSplitter,
    Circulator,
    DovePhase,
    ModeFourier,
    ModePermutation,
    ModePhase,
    RetroReflector,
    SorterPhases,
    Spp,
    adjoint,
    apply,
    fourier_matrix,
)
from .errors import InvalidArgumentError, WindowEscapeError
from .matrices import element_matrix
from .mesh import (
    Mesh,
    butterfly_fourier,
    decompose_rectangular,
    mesh_matrix,
    mesh_unitary,
    substitute_fourier,
)
from .networks import (
    Config,
    Kind,
    Network,
    ResourceTally,
    Variant,
    apply_network,
    build_gate,
    build_michelson,
    build_sorter,
    build_xd,
    build_xdp,
    minimal_window,
    network_matrix,
    tally_resources,
)
from .state import (
    BasisLabel,
    CodingSubspace,
    PhotonState,
    basis_state,
    fidelity,
    inner_product,
    mode_marginal,
)
from .verify import VerificationReport, cyclic_oracle, matrix_consistency_check, verify_gate

__version__ = "0.1.0"
