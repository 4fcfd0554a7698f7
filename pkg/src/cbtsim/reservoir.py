"""One reservoir qubit: non-Hermitian Hamiltonian, closed-form biorthogonal
eigensystem, Boltzmann right-eigenstate preparation, coupling operator with
stability shift, dual spectral functions and the modified KMS temperature.

Conventions (hbar = k_B = 1): the qubit Hamiltonian in the computational basis
is ``(omega/2) [[0, e^theta_q], [e^-theta_q, 0]]`` with real spectrum
``{+omega/2, -omega/2}``; level ``a`` is the upper one.  Right eigenvectors
are unit-normalized, ``<a_R|a_R> = <b_R|b_R> = 1``, and lefts are fixed by
biorthonormality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import BiorthogonalEigensystem, dag


class ClosedFormMismatch(ValueError):
    """Trace-formula and closed-form rates disagree (eigensystem labeling bug)."""


class NegativeRatio(ValueError):
    """Rate ratio is not positive; no real effective inverse temperature exists."""


@dataclass(frozen=True)
class ReservoirQubitSpec:
    """Parameters of one reservoir qubit and its coupling slot."""

    omega: float          # transition energy, > 0
    theta_q: float        # non-Hermiticity angle, [0, pi]
    beta: float           # inverse temperature, >= 0
    theta_c: float        # coupling angle, [0, 2 pi)

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if isinstance(self.theta_q, complex):
            raise ValueError("theta_q must be real (PT-unbroken regime only)")


@dataclass(frozen=True)
class BiorthogonalQubit:
    """Closed-form eigendata of one reservoir qubit.

    ``a`` is tied to eigenvalue +omega/2 and ``b`` to -omega/2 (by eigenvalue
    sign, never by ordering).  ``overlap = <a_R|b_R> = tanh(theta_q)``.
    """

    eigensystem: BiorthogonalEigensystem
    a_right: np.ndarray
    b_right: np.ndarray
    a_left: np.ndarray    # row vector
    b_left: np.ndarray
    overlap: float


@dataclass(frozen=True)
class SpectralData:
    """Per-collision loss/gain rates and derived diagnostics.

    ``gamma_*`` are the loss rates, ``gammabar_*`` the gain rates for the
    +omega / -omega transitions; ``delta_* = gammabar_* - gamma_*`` encode net
    amplification (positive) or dissipation (negative).  ``beta_bar`` is the
    effective inverse temperature from the modified KMS relation, or None when
    the ratio is non-positive.
    """

    gamma_plus: float
    gamma_minus: float
    gammabar_plus: float
    gammabar_minus: float
    delta_plus: float
    delta_minus: float
    b_ab: float
    b_ba: float
    w_a: float
    w_b: float
    beta_bar: float | None


def qubit_hamiltonian(spec: ReservoirQubitSpec):
    """2x2 non-Hermitian qubit Hamiltonian in the computational basis."""
    w, t = spec.omega, spec.theta_q
    return (w / 2) * np.array([[0.0, math.exp(t)], [math.exp(-t), 0.0]], dtype=complex)


def boltzmann_weights(beta, omega):
    """(w_a, w_b) with w_a the weight of the upper level; w_a + w_b = 1."""
    x = beta * omega / 2
    w_a = math.exp(-x) / (2 * math.cosh(x))
    return w_a, 1.0 - w_a


def biorthogonalize(spec: ReservoirQubitSpec) -> BiorthogonalQubit:
    """Closed-form biorthogonal eigensystem of the qubit Hamiltonian.

    Never defective for real theta_q: the right eigenvectors are proportional
    to (e^{theta_q/2}, +-e^{-theta_q/2}).
    """
    t = spec.theta_q
    norm = 1.0 / math.sqrt(2 * math.cosh(t))
    a_r = norm * np.array([math.exp(t / 2), math.exp(-t / 2)], dtype=complex)
    b_r = norm * np.array([math.exp(t / 2), -math.exp(-t / 2)], dtype=complex)
    rights = np.column_stack([b_r, a_r])           # ascending eigenvalue order
    lefts = np.linalg.inv(rights)
    eigsys = BiorthogonalEigensystem(
        values=np.array([-spec.omega / 2, spec.omega / 2], dtype=complex),
        rights=rights,
        lefts=lefts,
    )
    return BiorthogonalQubit(
        eigensystem=eigsys,
        a_right=a_r,
        b_right=b_r,
        a_left=lefts[1],
        b_left=lefts[0],
        overlap=math.tanh(t),
    )


def boltzmann_right_state(spec: ReservoirQubitSpec, qubit: BiorthogonalQubit):
    """Thermal mixture of right-eigenstate dyads; Hermitian, PSD, trace one."""
    w_a, w_b = boltzmann_weights(spec.beta, spec.omega)
    return w_a * np.outer(qubit.a_right, qubit.a_right.conj()) + \
        w_b * np.outer(qubit.b_right, qubit.b_right.conj())


def coupling_operator(theta_c):
    """Qubit-side coupling: relaxation/dephasing mixture set by theta_c."""
    s, c = math.sin(theta_c), math.cos(theta_c)
    return np.array([[s, c], [c, -s]], dtype=complex)


def stability_shift(b, rho_q):
    """Remove the thermal mean of the coupling operator.

    Returns ``(b - mu_b * I, mu_b)`` with ``mu_b = tr(b rho_q)``, so that
    ``tr(b_shifted rho_q) == 0``.
    """
    b = np.asarray(b, dtype=complex)
    mu_b = complex(np.trace(b @ rho_q))
    return b - mu_b * np.eye(b.shape[0], dtype=complex), mu_b


def transition_operators(spec: ReservoirQubitSpec, qubit: BiorthogonalQubit, b):
    """Qubit raising/lowering components of the coupling operator.

    ``b_minus`` raises the qubit (b -> a, system loses omega) and ``b_plus``
    lowers it.  Built from the unshifted coupling operator; an identity shift
    cannot change these off-diagonal components.
    """
    b = np.asarray(b, dtype=complex)
    b_ab = complex(qubit.a_left @ b @ qubit.b_right)
    b_ba = complex(qubit.b_left @ b @ qubit.a_right)
    b_minus = b_ab * np.outer(qubit.a_right, qubit.b_left)
    b_plus = b_ba * np.outer(qubit.b_right, qubit.a_left)
    return b_plus, b_minus, b_ab, b_ba


def spectral_functions(spec: ReservoirQubitSpec, qubit: BiorthogonalQubit, b,
                       tol=1e-10) -> SpectralData:
    """Dual spectral functions of one collision slot.

    Each of the four rates is evaluated two ways: by the defining trace
    formula against the Boltzmann right-state, and by the closed forms in the
    weights and matrix elements (w_b * b_ba * b_ab etc.).  The two paths must
    agree to ``tol``.

    Parameters
    ----------
    b : the *unshifted* physical coupling operator.

    Raises
    ------
    ClosedFormMismatch
        if the two computation paths disagree beyond ``tol``.
    """
    rho_q = boltzmann_right_state(spec, qubit)
    b_plus, b_minus, b_ab, b_ba = transition_operators(spec, qubit, b)
    w_a, w_b = boltzmann_weights(spec.beta, spec.omega)

    trace_rates = {
        "gamma_plus": np.trace(b_plus @ b_minus @ rho_q),
        "gammabar_plus": np.trace(dag(b_minus) @ b_minus @ rho_q),
        "gamma_minus": np.trace(b_minus @ b_plus @ rho_q),
        "gammabar_minus": np.trace(dag(b_plus) @ b_plus @ rho_q),
    }
    closed = {
        "gamma_plus": w_b * b_ba * b_ab,
        "gammabar_plus": w_b * np.conjugate(b_ab) * b_ab,
        "gamma_minus": w_a * b_ab * b_ba,
        "gammabar_minus": w_a * np.conjugate(b_ba) * b_ba,
    }
    for key in trace_rates:
        if abs(trace_rates[key] - closed[key]) > tol:
            raise ClosedFormMismatch(
                f"{key}: trace formula {trace_rates[key]} vs closed form "
                f"{closed[key]} (eigensystem labeling is inconsistent)"
            )

    gamma_plus = float(np.real(trace_rates["gamma_plus"]))
    gamma_minus = float(np.real(trace_rates["gamma_minus"]))
    gammabar_plus = float(np.real(trace_rates["gammabar_plus"]))
    gammabar_minus = float(np.real(trace_rates["gammabar_minus"]))

    try:
        beta_bar = modified_kms_value(
            gamma_plus, gammabar_minus, b_ab, b_ba, spec.omega, spec.beta)
    except NegativeRatio:
        beta_bar = None

    return SpectralData(
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        gammabar_plus=gammabar_plus,
        gammabar_minus=gammabar_minus,
        delta_plus=gammabar_plus - gamma_plus,
        delta_minus=gammabar_minus - gamma_minus,
        b_ab=float(np.real(b_ab)),
        b_ba=float(np.real(b_ba)),
        w_a=w_a,
        w_b=w_b,
        beta_bar=beta_bar,
    )


def modified_kms_value(gamma_plus, gammabar_minus, b_ab, b_ba, omega, beta,
                       tol=1e-10):
    """Effective inverse temperature from the gain/loss ratio.

    Asserts the three-way identity
    ``gammabar_minus / gamma_plus == e^{-beta omega} b_ba^* / b_ab == e^{-beta_bar omega}``
    to ``tol`` and returns ``beta_bar``.

    Raises
    ------
    NegativeRatio
        when the ratio is non-positive (no real temperature exists).
    """
    if gamma_plus == 0.0:
        raise NegativeRatio("gamma_plus vanishes; ratio undefined")
    eta = gammabar_minus / gamma_plus
    eta_matrix = math.exp(-beta * omega) * np.conjugate(b_ba) / b_ab
    if abs(eta - eta_matrix) > tol * max(1.0, abs(eta)):
        raise ClosedFormMismatch(
            f"KMS identity violated: rate ratio {eta} vs matrix-element form {eta_matrix}")
    if np.real(eta) <= 0.0 or abs(np.imag(eta_matrix)) > tol:
        raise NegativeRatio(f"rate ratio {eta} is not a positive real number")
    return -math.log(float(np.real(eta))) / omega


def modified_kms(data: SpectralData, omega, beta, tol=1e-10):
    """Recompute beta_bar from a SpectralData record (three-way check included)."""
    return modified_kms_value(
        data.gamma_plus, data.gammabar_minus, data.b_ab, data.b_ba, omega, beta, tol)
