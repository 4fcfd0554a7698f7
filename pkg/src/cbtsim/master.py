"""Coarse-grained master-equation engine: per-slot generators with dual
gain/loss rates, photon Lindblad damping, stepping at the collision interval,
the two-level population reduction with flux and time-reversal diagnostics,
and the second-order expansion of the collision map as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import dag, expm, kron
from .reservoir import SpectralData, qubit_hamiltonian, stability_shift
from .systems import PhotonSector, SystemModel, bohr_decompose
from .collision import CollisionSlot


@dataclass
class GeneratorSlot:
    """One collision slot's generator data.

    The action is
    ``L[rho] = -i[h_coherent, rho]
    + scale * sum_jumps gammabar A rho A^+
    - scale/2 * sum_diss {gamma A_minus A_plus, rho}_+
    + sum_extra rate (L rho L^+ - 1/2 {L^+ L, rho})``
    with ``scale = g^2 t_bar`` and the dagger-anticommutator
    ``{X, rho}_+ = X rho + rho X^+``.
    """

    h_coherent: np.ndarray
    jumps: list[tuple[np.ndarray, float]]          # (a_omega, gammabar)
    dissipations: list[tuple[np.ndarray, float]]   # (a_minus @ a_plus, gamma)
    scale: float                                   # g^2 t_bar
    extra_lindblads: list[tuple[np.ndarray, float]] = field(default_factory=list)


def qme_generator(model: SystemModel, slot: CollisionSlot, g, t_bar,
                  h_coherent=None, lift=None) -> GeneratorSlot:
    """Generator for one slot from its dual spectral functions.

    ``lift`` optionally embeds the system jump operators in a larger space
    (system x photon); ``h_coherent`` then supplies the matching coherent
    Hamiltonian.
    """
    sp = slot.spectral
    a_plus, a_minus = bohr_decompose(slot.a_op, model, slot.qubit.omega)
    assert np.max(np.abs(a_minus - dag(a_plus))) < 1e-10, \
        "raising operator must be the adjoint of the lowering one"
    if lift is not None:
        a_plus, a_minus = lift(a_plus), lift(a_minus)
    if h_coherent is None:
        h_coherent = model.h_s
    gammabar = {+1: sp.gammabar_plus, -1: sp.gammabar_minus}
    gamma = {+1: sp.gamma_plus, -1: sp.gamma_minus}
    a_of = {+1: a_plus, -1: a_minus}
    jumps = [(a_of[s], gammabar[s]) for s in (+1, -1)]
    dissipations = [(a_of[-s] @ a_of[s], gamma[s]) for s in (+1, -1)]
    return GeneratorSlot(
        h_coherent=np.asarray(h_coherent, dtype=complex),
        jumps=jumps, dissipations=dissipations, scale=g * g * t_bar)


def incoherent_action(rho, gen: GeneratorSlot):
    """Jump + dissipation + extra-Lindblad part of the generator."""
    out = np.zeros_like(rho)
    for a, gbar in gen.jumps:
        out += gen.scale * gbar * (a @ rho @ dag(a))
    for x, gam in gen.dissipations:
        xg = gen.scale * gam * x
        out -= 0.5 * (xg @ rho + rho @ dag(xg))
    for l, rate in gen.extra_lindblads:
        out += rate * (l @ rho @ dag(l))
        n = dag(l) @ l
        out -= 0.5 * rate * (n @ rho + rho @ n)
    return out


def generator_action(rho, gen: GeneratorSlot):
    """Full L[rho], coherent part included."""
    h = gen.h_coherent
    return -1j * (h @ rho - rho @ h) + incoherent_action(rho, gen)


def euler_step(rho, gen: GeneratorSlot, t_bar, substeps=1, mode="split"):
    """Advance one collision interval.

    mode="split" (default) conjugates with the exact coherent propagator and
    applies the incoherent increment forward-Euler; this is the difference
    equation in the frame rotating with ``h_coherent`` and stays stable for
    oscillatory spectra.  mode="literal" is the raw forward-Euler difference
    equation including the coherent commutator.
    """
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    rho = np.asarray(rho, dtype=complex)
    dt = t_bar / substeps
    if mode == "literal":
        for _ in range(substeps):
            rho = rho + dt * generator_action(rho, gen)
        return rho
    u = expm(-1j * gen.h_coherent * dt)
    for _ in range(substeps):
        rho = u @ (rho + dt * incoherent_action(rho, gen)) @ dag(u)
    return rho


def photon_dissipator(rho, sector: PhotonSector, sys_dim):
    """Lindblad damping of both photon modes on the system x photon space."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[0] != sys_dim * sector.dim:
        raise ValueError(
            f"state dim {rho.shape[0]} != system {sys_dim} x photon {sector.dim}")
    i_s = np.eye(sys_dim, dtype=complex)
    out = np.zeros_like(rho)
    for p in (sector.p1, sector.p2):
        l = kron(i_s, p)
        n = dag(l) @ l
        out += sector.kappa * (l @ rho @ dag(l) - 0.5 * (n @ rho + rho @ n))
    return out


@dataclass(frozen=True)
class PmeRates:
    """Two-level population transfer superoperators in the (+, -) ordering.

    ``forward`` acts on the upper-level population (the + -> - transition),
    ``backward`` on the lower one; each is a diagonal 2x2 matrix of
    gain/loss coefficients.
    """

    forward: np.ndarray
    backward: np.ndarray


def pme_reduce(spectral: SpectralData, chi_plus, chi_minus):
    """Population-sector reduction of the single-qubit master equation.

    Returns the transfer matrices and the net probability flux
    ``J = delta_plus chi_plus + delta_minus chi_minus``; J vanishes exactly
    at the stationary populations (complex balance).
    """
    if chi_plus < 0 or chi_minus < 0:
        raise ValueError("populations must be non-negative")
    forward = np.diag([-spectral.gamma_plus, spectral.gammabar_plus])
    backward = np.diag([spectral.gammabar_minus, -spectral.gamma_minus])
    flux = spectral.delta_plus * chi_plus + spectral.delta_minus * chi_minus
    return PmeRates(forward=forward, backward=backward), flux


def time_reversed_pme(spectral: SpectralData) -> PmeRates:
    """Transfer matrices under t -> -t: loss and gain rates swap roles."""
    forward = np.diag([-spectral.gammabar_plus, spectral.gamma_plus])
    backward = np.diag([spectral.gamma_minus, -spectral.gammabar_minus])
    return PmeRates(forward=forward, backward=backward)


def reverse_rates(rates: PmeRates) -> PmeRates:
    """Involution partner of a transfer-matrix pair (reversing twice is id)."""
    f = np.diag([-rates.forward[1, 1], -rates.forward[0, 0]])
    b = np.diag([-rates.backward[1, 1], -rates.backward[0, 0]])
    return PmeRates(forward=f, backward=b)


def second_order_map(rho_s, slot: CollisionSlot, g, t_bar, model: SystemModel):
    """Second-order expansion of one collision, full coupling, no RWA.

    Diagnostic only: evaluates the double-commutator truncation of the
    collision map in the one-step interaction frame, with the stability shift
    applied to the coupling operator (its thermal mean removed).  Agrees with
    the interaction-frame collision gate to third order in t_bar.
    """
    rho_s = np.asarray(rho_s, dtype=complex)
    d = model.dim
    h_i = interaction_frame_coupling(slot, g, t_bar, model)
    joint = kron(rho_s, slot.rho_q)
    sandwich = h_i @ joint @ dag(h_i)
    h2 = h_i @ h_i
    anti = h2 @ joint + joint @ dag(h2)
    inc = sandwich - 0.5 * anti
    from .linalg import SpaceShape, partial_trace
    return rho_s + t_bar ** 2 * partial_trace(inc, SpaceShape((d, 2)), keep=0)


def interaction_frame_coupling(slot: CollisionSlot, g, t_bar, model: SystemModel):
    """g A x B_shifted conjugated into the one-step interaction frame."""
    d = model.dim
    b_shifted, _ = stability_shift(slot.b_op, slot.rho_q)
    h_sq = g * kron(slot.a_op, b_shifted)
    h0 = kron(model.h_s, np.eye(2, dtype=complex)) \
        + kron(np.eye(d, dtype=complex), qubit_hamiltonian(slot.qubit))
    u0 = expm(-1j * h0 * t_bar)
    return u0 @ h_sq @ np.linalg.inv(u0)
