"""Exact collision-map engine: joint-space gate assembly, non-unitary
conjugation, qubit trace-out, periodic scheduling, and the joint
system-photon variant with photon damping.

Each collision couples the system to a fresh reservoir qubit through the
energy-conserving (resonant) components of the coupling, ``g (A_+ B_- +
A_- B_+)``; the raw product coupling ``g A B`` is available as
``coupling="bare"``.  The gate is the exponential of the full joint
Hamiltonian and is generally non-unitary, so the map can change the trace;
traces are recorded, never renormalized.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import SpaceShape, dag, expm, kron, partial_trace
from .reservoir import (
    BiorthogonalQubit,
    ReservoirQubitSpec,
    SpectralData,
    biorthogonalize,
    boltzmann_right_state,
    coupling_operator,
    spectral_functions,
    stability_shift,
    transition_operators,
)
from .systems import PhotonSector, SystemModel, bohr_decompose


class StateWarning(UserWarning):
    """Input state violates Hermiticity/positivity beyond tolerance."""


@dataclass(frozen=True)
class CollisionSlot:
    """One slot of the periodic schedule: a qubit, its coupling, and the
    system-side operator split into resonant components."""

    qubit: ReservoirQubitSpec
    a_op: np.ndarray                 # full Hermitian system coupling
    a_plus: np.ndarray               # lowering part at the slot frequency
    transition: tuple[int, int]
    h_sys: np.ndarray = field(repr=False)
    qubit_data: BiorthogonalQubit = field(repr=False)
    rho_q: np.ndarray = field(repr=False)
    b_op: np.ndarray = field(repr=False)
    spectral: SpectralData = field(repr=False)
    mu_b: complex = 0.0


def make_slot(qubit_spec: ReservoirQubitSpec, a_op, model: SystemModel,
              transition) -> CollisionSlot:
    """Assemble a slot; checks the qubit is resonant with its transition."""
    i, j, omega = transition
    if abs(qubit_spec.omega - omega) > 1e-9 * max(1.0, omega):
        raise ValueError(
            f"qubit frequency {qubit_spec.omega} does not match transition "
            f"({i},{j}) gap {omega}")
    qubit = biorthogonalize(qubit_spec)
    rho_q = boltzmann_right_state(qubit_spec, qubit)
    b_op = coupling_operator(qubit_spec.theta_c)
    _, mu_b = stability_shift(b_op, rho_q)
    a_plus, _ = bohr_decompose(a_op, model, qubit_spec.omega)
    spectral = spectral_functions(qubit_spec, qubit, b_op)
    return CollisionSlot(
        qubit=qubit_spec, a_op=np.asarray(a_op, dtype=complex), a_plus=a_plus,
        transition=(i, j), h_sys=model.h_s, qubit_data=qubit, rho_q=rho_q,
        b_op=b_op, spectral=spectral, mu_b=mu_b)


@dataclass
class CollisionSchedule:
    """Ordered periodic list of slots plus the global schedule parameters."""

    slots: list[CollisionSlot]
    g: float
    t_bar: float
    periods: int
    shift_enabled: bool = True
    coupling: str = "resonant"       # "resonant" | "bare"

    def __post_init__(self):
        if not self.t_bar > 0:
            raise ValueError(f"t_bar must be > 0, got {self.t_bar}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.coupling not in ("resonant", "bare"):
            raise ValueError(f"unknown coupling mode {self.coupling!r}")

    @property
    def n_collisions(self):
        return self.periods * len(self.slots)


@dataclass
class Trajectory:
    """Recorded time series, indexed by collision step."""

    steps: np.ndarray                      # recorded collision indices
    times: np.ndarray                      # t = n * t_bar
    traces: np.ndarray
    observables: dict[str, np.ndarray]
    states: list[np.ndarray] | None = None


def interaction_hamiltonian(slot: CollisionSlot, sys_lift=None,
                            coupling="resonant", shift_enabled=True):
    """System-qubit coupling operator on (system x qubit).

    ``sys_lift`` optionally embeds the system-side operators into a larger
    space (e.g. system x photon) before taking the qubit tensor factor.
    """
    lift = (lambda m: m) if sys_lift is None else sys_lift
    if coupling == "resonant":
        b_plus, b_minus, _, _ = transition_operators(
            slot.qubit, slot.qubit_data, slot.b_op)
        a_plus = lift(slot.a_plus)
        return kron(a_plus, b_minus) + kron(dag(a_plus), b_plus)
    b = slot.b_op
    if shift_enabled:
        b = b - slot.mu_b * np.eye(2, dtype=complex)
    return kron(lift(slot.a_op), b)


def collision_gate(h_sys, slot: CollisionSlot, g, t_bar, sys_lift=None,
                   coupling="resonant", shift_enabled=True):
    """Joint-space gate exp(-i H t_bar) for one collision."""
    d = h_sys.shape[0]
    from .reservoir import qubit_hamiltonian
    h = kron(h_sys, np.eye(2, dtype=complex)) \
        + kron(np.eye(d, dtype=complex), qubit_hamiltonian(slot.qubit)) \
        + g * interaction_hamiltonian(slot, sys_lift, coupling, shift_enabled)
    return expm(-1j * h * t_bar)


def _check_state(rho, herm_tol=1e-10, psd_tol=1e-8):
    if np.max(np.abs(rho - dag(rho))) > herm_tol:
        warnings.warn("input state is not Hermitian within tolerance", StateWarning)
        return
    lo = float(np.min(np.linalg.eigvalsh(0.5 * (rho + dag(rho)))))
    if lo < -psd_tol:
        warnings.warn(f"input state has negative eigenvalue {lo:.2e}", StateWarning)


def apply_gate(rho_s, gate, rho_q, dim_s):
    """One collision given a prebuilt gate: conjugate and trace out the qubit."""
    joint = gate @ kron(rho_s, rho_q) @ dag(gate)
    return partial_trace(joint, SpaceShape((dim_s, 2)), keep=0)


def collide(rho_s, slot: CollisionSlot, g, t_bar, h_sys=None,
            coupling="resonant", shift_enabled=True, validate=True):
    """Single collision of the system with the slot's reservoir qubit.

    ``h_sys`` defaults to the system Hamiltonian captured in the slot;
    scenario engines cache the per-slot gates instead, since the schedule is
    periodic and only N_q distinct exponentials ever exist per run.
    """
    rho_s = np.asarray(rho_s, dtype=complex)
    if h_sys is None:
        h_sys = slot.h_sys
    if rho_s.shape != h_sys.shape:
        raise ValueError(f"state shape {rho_s.shape} does not match h_sys {h_sys.shape}")
    if validate:
        _check_state(rho_s)
    gate = collision_gate(h_sys, slot, g, t_bar,
                          coupling=coupling, shift_enabled=shift_enabled)
    return apply_gate(rho_s, gate, slot.rho_q, rho_s.shape[0])


def build_gates(h_sys, schedule: CollisionSchedule, sys_lift=None):
    """One gate per slot; the schedule is periodic so nothing else is needed."""
    return [
        collision_gate(h_sys, slot, schedule.g, schedule.t_bar, sys_lift,
                       schedule.coupling, schedule.shift_enabled)
        for slot in schedule.slots
    ]


def _record_steps(n_collisions, stride):
    steps = list(range(0, n_collisions + 1, stride))
    if steps[-1] != n_collisions:
        steps.append(n_collisions)
    return steps


def run_collisions(rho0, h_sys, schedule: CollisionSchedule, observables=None,
                   stride=1, store_states=False) -> Trajectory:
    """Iterate the collision map over the periodic schedule.

    Observables are normalized expectation values tr(rho O)/tr(rho), recorded
    every ``stride`` collisions (endpoints always included).  Deterministic
    for fixed inputs.
    """
    observables = observables or {}
    rho = np.asarray(rho0, dtype=complex).copy()
    gates = build_gates(h_sys, schedule)
    n_slots = len(schedule.slots)
    n_coll = schedule.n_collisions
    record = set(_record_steps(n_coll, stride))

    steps, times, traces = [], [], []
    series = {name: [] for name in observables}
    states = [] if store_states else None

    def snapshot(n):
        tr = complex(np.trace(rho)).real
        steps.append(n)
        times.append(n * schedule.t_bar)
        traces.append(tr)
        for name, op in observables.items():
            series[name].append(float(np.real(np.trace(rho @ op))) / tr)
        if store_states:
            states.append(rho.copy())

    snapshot(0)
    dim_s = rho.shape[0]
    for n in range(n_coll):
        slot = schedule.slots[n % n_slots]
        rho = apply_gate(rho, gates[n % n_slots], slot.rho_q, dim_s)
        if (n + 1) in record:
            snapshot(n + 1)

    return Trajectory(
        steps=np.array(steps), times=np.array(times), traces=np.array(traces),
        observables={k: np.array(v) for k, v in series.items()}, states=states)


def joint_hamiltonian(model: SystemModel, sector: PhotonSector):
    """System x photon coherent Hamiltonian H_s + H_p + H_sp."""
    ipp = np.eye(sector.dim, dtype=complex)
    return kron(model.h_s, ipp) + kron(np.eye(model.dim, dtype=complex), sector.h_photon) \
        + sector.h_int


def collide_joint(rho_sp, slot: CollisionSlot, g, t_bar, model: SystemModel,
                  sector: PhotonSector, coupling="resonant", shift_enabled=True,
                  splitting="euler"):
    """One collision of the system x photon state, then photon damping.

    Operator splitting: the full collision map with the total Hamiltonian on
    system x photon x qubit, trace out the qubit, then an explicit-Euler
    photon-damping step of size t_bar (``splitting="strang"`` wraps the
    collision between two half-steps instead).
    """
    from .master import photon_dissipator

    rho_sp = np.asarray(rho_sp, dtype=complex)
    dim_sp = model.dim * sector.dim
    if rho_sp.shape != (dim_sp, dim_sp):
        raise ValueError(f"state shape {rho_sp.shape} != joint dim {dim_sp}")
    h_sp = joint_hamiltonian(model, sector)
    ipp = np.eye(sector.dim, dtype=complex)
    lift = lambda m: kron(m, ipp)
    gate = collision_gate(h_sp, slot, g, t_bar, sys_lift=lift,
                          coupling=coupling, shift_enabled=shift_enabled)
    if splitting == "strang":
        rho_sp = rho_sp + 0.5 * t_bar * photon_dissipator(rho_sp, sector, model.dim)
        rho_sp = apply_gate(rho_sp, gate, slot.rho_q, dim_sp)
        return rho_sp + 0.5 * t_bar * photon_dissipator(rho_sp, sector, model.dim)
    rho_sp = apply_gate(rho_sp, gate, slot.rho_q, dim_sp)
    return rho_sp + t_bar * photon_dissipator(rho_sp, sector, model.dim)


def choi_matrix(channel, dim):
    """Choi matrix of a linear map on dim x dim matrices (CP iff PSD)."""
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = 1.0
            out = channel(e)
            for k in range(dim):
                for l in range(dim):
                    choi[i * dim + k, j * dim + l] = out[k, l]
    return choi
