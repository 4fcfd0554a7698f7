"""Collision-model simulator for driven-dissipative thermalization with
non-Hermitian reservoir qubits: exact collision maps, the matching master
equation with dual gain/loss rates, Liouvillian spectral analysis, and the
bundled emission/synchronization scenarios."""

__version__ = "0.1.0"

from .linalg import (
    BiorthogonalEigensystem,
    DefectiveMatrixError,
    SpaceShape,
    dag,
    eig_biorthogonal,
    expm,
    kron,
    partial_trace,
)
from .reservoir import (
    BiorthogonalQubit,
    ClosedFormMismatch,
    NegativeRatio,
    ReservoirQubitSpec,
    SpectralData,
    biorthogonalize,
    boltzmann_right_state,
    coupling_operator,
    modified_kms,
    qubit_hamiltonian,
    spectral_functions,
    stability_shift,
)
from .systems import (
    DegenerateSpectrum,
    PhotonSector,
    SystemModel,
    TransitionTable,
    bohr_decompose,
    photon_sector,
    three_level_model,
    transition_table,
    two_level_model,
    two_spin_model,
)
from .collision import (
    CollisionSchedule,
    CollisionSlot,
    Trajectory,
    collide,
    collide_joint,
    make_slot,
    run_collisions,
)
from .master import (
    GeneratorSlot,
    euler_step,
    photon_dissipator,
    pme_reduce,
    qme_generator,
    second_order_map,
    time_reversed_pme,
)
from .liouville import (
    LepReport,
    LiouvillianMatrix,
    lep_detect,
    liouvillian_spectrum,
    period_average,
    vectorize,
)
from .observables import (
    G2Curve,
    ZeroTrace,
    ZeroVariance,
    bloch_vector,
    expval,
    g2,
    pearson,
    photon_numbers,
)
from .scenarios import (
    ConfigError,
    benchmark_map_vs_qme,
    default_config,
    dichromatic_run,
    phase_scan,
    qs_run,
    run_scenario,
    single_qubit_run,
)
