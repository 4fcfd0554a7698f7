"""Dense complex linear algebra: tensor products, partial traces, matrix
exponentials and biorthogonal (left/right) eigendecompositions.

Everything operates on plain ``numpy`` arrays of ``complex128``; matrices are
never wrapped.  All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class DefectiveMatrixError(ValueError):
    """Eigenvector matrix is numerically singular: the input is at or near an
    exceptional point and has no reliable biorthogonal eigensystem."""


@dataclass(frozen=True)
class SpaceShape:
    """Ordered factorization of a tensor-product space into subsystem dims."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if not self.dims or any(d < 2 for d in self.dims):
            raise ValueError(f"subsystem dims must all be >= 2, got {self.dims}")

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class BiorthogonalEigensystem:
    """Eigendata of a (generally non-Hermitian) matrix.

    ``rights[k]`` are unit-norm column eigenvectors, ``lefts[k]`` row vectors
    rescaled so that ``lefts[i] @ rights[j] = delta_ij``.  Ordering is
    deterministic: ascending real part, ties broken by imaginary part.
    """

    values: np.ndarray   # shape (n,), complex
    rights: np.ndarray   # shape (n, n), columns are right eigenvectors
    lefts: np.ndarray    # shape (n, n), rows are left eigenvectors


def dag(m):
    """Conjugate transpose."""
    return np.conjugate(np.swapaxes(m, -1, -2))


def kron(a, b):
    """Tensor product; entry ((i1,i2),(j1,j2)) = a[i1,j1] * b[i2,j2]."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, shape: SpaceShape, keep: int):
    """Trace out every factor of ``shape`` except ``keep``.

    Parameters
    ----------
    m : array, square with dimension shape.total
    shape : SpaceShape describing the tensor factorization of m
    keep : index of the subsystem to keep

    Returns
    -------
    The reduced matrix on the kept factor; tr(result) == tr(m).
    """
    m = np.asarray(m, dtype=complex)
    dims = shape.dims
    n = len(dims)
    if m.shape != (shape.total, shape.total):
        raise ValueError(f"matrix shape {m.shape} does not match factorization {dims}")
    if not 0 <= keep < n:
        raise ValueError(f"keep index {keep} out of range for {n} factors")
    t = m.reshape(dims + dims)
    # contract every factor except `keep`, from the highest axis down so the
    # remaining axis numbers stay valid
    for ax in reversed(range(n)):
        if ax == keep:
            continue
        t = np.trace(t, axis1=ax, axis2=ax + (t.ndim // 2))
    return t


def expm(m):
    """Matrix exponential via scaling-and-squaring (valid for non-normal input)."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {m.shape}")
    return scipy.linalg.expm(m)


def eig_biorthogonal(m, cond_threshold=1e12) -> BiorthogonalEigensystem:
    """Diagonalize ``m`` and return paired left/right eigenvectors.

    Right eigenvectors are unit-normalized; left ones are the rows of the
    inverse of the right-eigenvector matrix, so ``lefts @ rights == I``.

    Raises
    ------
    DefectiveMatrixError
        when the right-eigenvector matrix has condition number above
        ``cond_threshold`` (input defective or near an exceptional point).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    values, rights = np.linalg.eig(m)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    rights = rights[:, order]
    rights = rights / np.linalg.norm(rights, axis=0, keepdims=True)
    cond = np.linalg.cond(rights)
    if not np.isfinite(cond) or cond > cond_threshold:
        raise DefectiveMatrixError(
            f"eigenvector matrix condition number {cond:.3e} exceeds "
            f"{cond_threshold:.1e}; matrix is (near-)defective"
        )
    lefts = np.linalg.inv(rights)
    return BiorthogonalEigensystem(values=values, rights=rights, lefts=lefts)


def is_hermitian(m, tol=1e-10):
    m = np.asarray(m)
    return bool(np.all(np.abs(m - dag(m)) <= tol))
