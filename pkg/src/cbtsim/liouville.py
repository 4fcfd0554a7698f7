"""Liouvillian vectorization, spectra, oscillation-mode identification, and
exceptional-point detection.

Vectorization is column-stacking: ``vec(A rho B) = (B^T kron A) vec(rho)``,
so the commutator ``-i[H, rho]`` maps to ``-i (I kron H - H^T kron I)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .master import GeneratorSlot


@dataclass(frozen=True)
class LiouvillianMatrix:
    """Vectorized generator: a d^2 x d^2 matrix acting on vec(rho)."""

    dim: int                  # d^2
    matrix: np.ndarray = field(repr=False)
    source: str = "per-slot"  # "per-slot" | "period-averaged" | "composite"


@dataclass(frozen=True)
class EigenvalueCluster:
    center: complex
    members: tuple[int, ...]
    algebraic: int
    geometric: int
    lep_order: int            # algebraic - geometric + 1; 1 means no LEP


@dataclass(frozen=True)
class LepReport:
    clusters: tuple[EigenvalueCluster, ...]
    oscillation_pair: tuple[complex, complex] | None


def vec(rho):
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v):
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v, dtype=complex).reshape((d, d), order="F")


def vectorize(gen: GeneratorSlot) -> LiouvillianMatrix:
    """Vectorized matrix of the full generator (coherent part included)."""
    h = gen.h_coherent
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for a, gbar in gen.jumps:
        m += gen.scale * gbar * np.kron(a.conj(), a)
    for x, gam in gen.dissipations:
        xg = gen.scale * gam * x
        m += -0.5 * (np.kron(eye, xg) + np.kron(xg.conj(), eye))
    for l, rate in gen.extra_lindblads:
        n = l.conj().T @ l
        m += rate * np.kron(l.conj(), l)
        m += -0.5 * rate * (np.kron(eye, n) + np.kron(n.conj(), eye))
    return LiouvillianMatrix(dim=d * d, matrix=m, source="per-slot")


def period_average(slot_matrices) -> LiouvillianMatrix:
    """Uniform average of per-slot vectorized generators over one period."""
    mats = [lm.matrix for lm in slot_matrices]
    dims = {lm.dim for lm in slot_matrices}
    if len(dims) != 1:
        raise ValueError(f"slots act on different spaces: dims {sorted(dims)}")
    return LiouvillianMatrix(
        dim=dims.pop(), matrix=sum(mats) / len(mats), source="period-averaged")


def composite_log_generator(slot_matrices, t_bar) -> LiouvillianMatrix:
    """Effective generator log(prod_l e^{t_bar L_l}) / (N t_bar)."""
    import scipy.linalg
    mats = [lm.matrix for lm in slot_matrices]
    step = np.eye(mats[0].shape[0], dtype=complex)
    for m in mats:
        step = scipy.linalg.expm(t_bar * m) @ step
    eff = scipy.linalg.logm(step) / (len(mats) * t_bar)
    return LiouvillianMatrix(dim=slot_matrices[0].dim, matrix=eff, source="composite")


def liouvillian_spectrum(lm: LiouvillianMatrix):
    """Eigenvalues sorted by descending real part (ties by imaginary part).

    Positive real parts are physical here (amplification), so nothing is
    raised; callers can inspect the leading values.
    """
    values, vectors = np.linalg.eig(lm.matrix)
    order = np.lexsort((values.imag, -values.real))
    return values[order], vectors[:, order]


def oscillation_pair(values, re_tol=None, im_tol=1e-6):
    """The conjugate eigenvalue pair with maximal real part and nonzero
    imaginary part, or None if no such pair exists."""
    values = np.asarray(values)
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    if re_tol is None:
        re_tol = 1e-7 * scale
    osc = values[np.abs(values.imag) > im_tol * scale]
    if osc.size == 0:
        return None
    top = osc[np.argmax(osc.real)]
    partner_idx = np.argmin(np.abs(osc - np.conjugate(top)))
    partner = osc[partner_idx]
    if abs(partner - np.conjugate(top)) > max(re_tol, 1e-6 * scale):
        return None
    return (complex(top), complex(partner))


def lep_detect(lm: LiouvillianMatrix, tol_cluster=None, tol_rank=1e-6) -> LepReport:
    """Cluster the spectrum and estimate exceptional-point orders.

    Eigenvalues within ``tol_cluster`` (default 1e-7 * ||L||) form a cluster;
    the geometric multiplicity is the numerical rank of the stacked
    eigenvectors at relative singular-value threshold ``tol_rank``.  A cluster
    with geometric < algebraic multiplicity is a coalescence of order
    ``algebraic - geometric + 1``.

    Near a genuine order-k point the eigenvalues scatter like eps^(1/k) under
    backward error eps, so detecting high orders needs tolerances far looser
    than machine precision (e.g. 1e-3 / 1e-2 for k = 4).
    """
    norm = float(np.linalg.norm(lm.matrix, 2))
    if tol_cluster is None:
        tol_cluster = 1e-7 * max(1.0, norm)
    values, vectors = liouvillian_spectrum(lm)

    unassigned = list(range(len(values)))
    clusters = []
    while unassigned:
        seed = unassigned.pop(0)
        members = [seed]
        changed = True
        while changed:
            changed = False
            center = np.mean(values[members])
            for k in list(unassigned):
                if abs(values[k] - center) <= tol_cluster:
                    members.append(k)
                    unassigned.remove(k)
                    changed = True
        members = sorted(members)
        v = vectors[:, members]
        sv = np.linalg.svd(v, compute_uv=False)
        geometric = int(np.sum(sv > tol_rank * sv[0])) if sv.size else 0
        alg = len(members)
        clusters.append(EigenvalueCluster(
            center=complex(np.mean(values[members])), members=tuple(members),
            algebraic=alg, geometric=geometric,
            lep_order=alg - geometric + 1))

    clusters.sort(key=lambda c: (-c.lep_order, -c.algebraic, -c.center.real))
    return LepReport(
        clusters=tuple(clusters),
        oscillation_pair=oscillation_pair(values))
