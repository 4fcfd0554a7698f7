"""System Hamiltonians (two-level, three-level ladder, Ising-coupled spin
pair), Bohr-frequency decomposition of coupling operators, and the truncated
two-mode photon sector."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import dag, kron

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


class DegenerateSpectrum(ValueError):
    """Two Bohr frequencies coincide; qubit-to-transition assignment ambiguous."""


@dataclass(frozen=True)
class SystemModel:
    """Hermitian system Hamiltonian with its eigenstructure.

    Energies are shifted so the ground state sits at zero; Bohr frequencies
    are shift-invariant.  ``projectors[i]`` projects onto eigenlevel i.
    """

    h_s: np.ndarray
    dim: int
    labels: tuple[str, ...]
    energies: np.ndarray          # ascending, ground state at 0
    eigvecs: np.ndarray           # columns
    projectors: tuple[np.ndarray, ...] = field(repr=False)


@dataclass(frozen=True)
class TransitionTable:
    """Sorted positive Bohr transitions (i, j, omega_ij) with i < j."""

    entries: tuple[tuple[int, int, float], ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class PhotonSector:
    """Two truncated photon modes and their couplings to a three-level ladder."""

    mode_freqs: tuple[float, float]     # (omega_21, omega_10)
    cutoff: int
    g_int: float
    kappa: float
    p1: np.ndarray                      # annihilation ops on the joint photon space
    p2: np.ndarray
    h_photon: np.ndarray
    h_int: np.ndarray                   # system (x) photon Jaynes-Cummings coupling
    dim: int                            # (cutoff+1)**2


def _make_model(h_s, labels, degeneracy_tol=None):
    h_s = np.asarray(h_s, dtype=complex)
    if np.max(np.abs(h_s - dag(h_s))) > 1e-12:
        raise ValueError("system Hamiltonian must be Hermitian")
    energies, eigvecs = np.linalg.eigh(h_s)
    energies = energies - energies[0]
    projectors = tuple(
        np.outer(eigvecs[:, i], eigvecs[:, i].conj()) for i in range(len(energies)))
    model = SystemModel(
        h_s=h_s, dim=h_s.shape[0], labels=tuple(labels),
        energies=energies, eigvecs=eigvecs, projectors=projectors)
    if degeneracy_tol is not None:
        gaps = [w for (_, _, w) in transition_table(model)]
        for k in range(1, len(gaps)):
            if abs(gaps[k] - gaps[k - 1]) < degeneracy_tol:
                raise DegenerateSpectrum(
                    f"Bohr frequencies {gaps[k-1]} and {gaps[k]} coincide within "
                    f"{degeneracy_tol}")
    return model


def transition_table(model: SystemModel) -> TransitionTable:
    entries = []
    for i in range(model.dim):
        for j in range(i + 1, model.dim):
            w = float(model.energies[j] - model.energies[i])
            if w > 0:
                entries.append((i, j, w))
    entries.sort(key=lambda e: (e[2], e[0], e[1]))
    return TransitionTable(entries=tuple(entries))


def two_level_model(omega):
    """Minimal system: one qubit with gap ``omega``; coupling operator sigma^x."""
    if not omega > 0:
        raise ValueError("omega must be > 0")
    model = _make_model(np.diag([0.0, omega]), ("-", "+"))
    return model, SIGMA_X.copy()


def three_level_model(omega10, omega21):
    """Energy ladder 0, omega10, omega10+omega21 with the spin-1 x coupling."""
    if not (omega10 > 0 and omega21 > 0):
        raise ValueError("omega10 and omega21 must be > 0")
    h = np.diag([0.0, omega10, omega10 + omega21])
    s_x = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / np.sqrt(2)
    return _make_model(h, ("0", "1", "2")), s_x


def two_spin_model(j_coupling, h_x, h_z, degeneracy_tol=1e-9):
    """Two spin-1/2 with Ising zz coupling and transverse/longitudinal fields.

    Raises DegenerateSpectrum when two Bohr frequencies coincide within
    ``degeneracy_tol`` (the per-transition coupling angle would be ambiguous).
    """
    sx, sz = SIGMA_X / 2, SIGMA_Z / 2
    h = (j_coupling * kron(sz, sz)
         + h_x * (kron(sx, I2) + kron(I2, sx))
         + h_z * (kron(sz, I2) + kron(I2, sz)))
    return _make_model(h, ("0", "1", "2", "3"), degeneracy_tol=degeneracy_tol)


def spin_ops(index):
    """(s^x, s^y, s^z) for spin ``index`` (0 or 1) of the two-spin system."""
    if index == 0:
        return (kron(SIGMA_X / 2, I2), kron(SIGMA_Y / 2, I2), kron(SIGMA_Z / 2, I2))
    return (kron(I2, SIGMA_X / 2), kron(I2, SIGMA_Y / 2), kron(I2, SIGMA_Z / 2))


def bohr_decompose(a, model: SystemModel, omega, tol=None):
    """Split a coupling operator into lowering/raising parts at one frequency.

    ``a_plus`` collects every eigenprojector sandwich P_i a P_j with
    E_j - E_i = omega (lowering the system energy by omega); ``a_minus`` is
    its raising counterpart.  Returns zero matrices off resonance.
    """
    a = np.asarray(a, dtype=complex)
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(model.energies))))
    a_plus = np.zeros_like(a)
    for i in range(model.dim):
        for j in range(model.dim):
            if abs((model.energies[j] - model.energies[i]) - omega) < tol:
                a_plus += model.projectors[i] @ a @ model.projectors[j]
    a_minus = np.zeros_like(a)
    for i in range(model.dim):
        for j in range(model.dim):
            if abs((model.energies[i] - model.energies[j]) - omega) < tol:
                a_minus += model.projectors[i] @ a @ model.projectors[j]
    if np.max(np.abs(a - dag(a))) < 1e-12:
        assert np.max(np.abs(a_minus - dag(a_plus))) < 1e-10, \
            "raising part must be the adjoint of the lowering part for Hermitian input"
    return a_plus, a_minus


def annihilation_operator(cutoff):
    """Truncated single-mode annihilation operator, sqrt(k) superdiagonal."""
    d = cutoff + 1
    p = np.zeros((d, d), dtype=complex)
    for k in range(1, d):
        p[k - 1, k] = np.sqrt(k)
    return p


def photon_sector(omega21, omega10, cutoff, g_int, kappa) -> PhotonSector:
    """Two photon modes coupled to the 2<->1 and 1<->0 ladder transitions.

    The Jaynes-Cummings form couples each mode resonantly to its own
    transition, so no rotating-wave bookkeeping is needed downstream.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    d = cutoff + 1
    p = annihilation_operator(cutoff)
    ip = np.eye(d, dtype=complex)
    p1 = kron(p, ip)
    p2 = kron(ip, p)
    h_photon = omega21 * dag(p1) @ p1 + omega10 * dag(p2) @ p2
    e = np.eye(3, dtype=complex)
    lower21 = np.outer(e[:, 2], e[:, 1])       # |2><1|
    lower10 = np.outer(e[:, 1], e[:, 0])       # |1><0|
    h_int = g_int * (kron(lower21, p1) + kron(lower10, p2))
    h_int = h_int + dag(h_int)
    return PhotonSector(
        mode_freqs=(omega21, omega10), cutoff=cutoff, g_int=g_int, kappa=kappa,
        p1=p1, p2=p2, h_photon=h_photon, h_int=h_int, dim=d * d)
