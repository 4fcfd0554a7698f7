"""Normalized expectation values, photon numbers, two-time intensity
correlations via quantum regression, the windowed Pearson synchronization
coefficient, and Bloch vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import dag, kron
from .systems import PhotonSector, spin_ops


class ZeroTrace(ValueError):
    """State has (numerically) vanishing trace; expectation undefined."""


class ZeroVariance(ValueError):
    """A windowed series is constant; the Pearson coefficient is undefined."""


class ZeroDenominator(ValueError):
    """A correlation denominator vanishes (empty mode under normal ordering)."""


@dataclass(frozen=True)
class G2Curve:
    """Second-order two-time correlation at fixed base step vs lag."""

    n_base: int
    lags: np.ndarray
    values: np.ndarray
    pair: tuple[int, int]
    ordering: str                 # "pp_dagger" | "normal"

    @property
    def taus(self):
        return self.lags


def expval(rho, op, imag_tol=1e-9):
    """tr(rho op) / tr(rho); the real part for effectively-Hermitian results."""
    rho = np.asarray(rho, dtype=complex)
    tr = complex(np.trace(rho))
    if abs(tr) < 1e-300:
        raise ZeroTrace("state trace vanishes")
    val = complex(np.trace(rho @ op)) / tr
    if abs(val.imag) <= imag_tol * max(1.0, abs(val)):
        return float(val.real)
    return val


def photon_numbers(rho_sp, sector: PhotonSector, sys_dim):
    """Normalized (<n1>, <n2>) of the joint system x photon state."""
    i_s = np.eye(sys_dim, dtype=complex)
    n1 = kron(i_s, dag(sector.p1) @ sector.p1)
    n2 = kron(i_s, dag(sector.p2) @ sector.p2)
    return expval(rho_sp, n1), expval(rho_sp, n2)


def g2(rho_n, p_x1, p_x2, lags, stepper, n_base=0, ordering="pp_dagger",
       pair=(1, 2), imag_tol=1e-9):
    """Second-order two-time correlation by quantum regression.

    Parameters
    ----------
    rho_n : joint state at the base step
    p_x1, p_x2 : the two mode annihilation operators on the full state space
    lags : iterable of non-negative integer step lags
    stepper : callable (sigma, n) -> sigma advancing one collision step; must
        be the *same* linear map that produced the trajectory
    ordering : "pp_dagger" evaluates < p1 p2(lag) p2(lag)^+ p1^+ > with both
        denominators < p p^+ > at the base step; "normal" is the textbook
        intensity correlation < p1^+ p2^+(lag) p2(lag) p1 > / (<n1><n2>).
    """
    rho_n = np.asarray(rho_n, dtype=complex)
    lags = sorted(int(l) for l in lags)
    if lags[0] < 0:
        raise ValueError("lags must be non-negative")
    trn = complex(np.trace(rho_n)).real
    if abs(trn) < 1e-300:
        raise ZeroTrace("base state trace vanishes")

    if ordering == "pp_dagger":
        den1 = expval(rho_n, p_x1 @ dag(p_x1))
        den2 = expval(rho_n, p_x2 @ dag(p_x2))
        sigma = dag(p_x1) @ rho_n @ p_x1
        probe = p_x2 @ dag(p_x2)
    elif ordering == "normal":
        den1 = expval(rho_n, dag(p_x1) @ p_x1)
        den2 = expval(rho_n, dag(p_x2) @ p_x2)
        if den1 <= 1e-300 or den2 <= 1e-300:
            raise ZeroDenominator(
                f"mode occupations ({den1:.3e}, {den2:.3e}) vanish at the base step")
        sigma = p_x1 @ rho_n @ dag(p_x1)
        probe = dag(p_x2) @ p_x2
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    # with the p p^+ ordering the denominators are >= 1 on any PSD state
    assert den1 > 0 and den2 > 0, "denominators must be positive on a PSD state"

    lagset = set(lags)
    values = {}

    def record(k):
        num = complex(np.trace(sigma @ probe)) / trn
        if abs(num.imag) > imag_tol * max(1.0, abs(num)):
            raise ValueError(f"correlation at lag {k} has imaginary residue {num.imag}")
        values[k] = num.real / (den1 * den2)

    if 0 in lagset:
        record(0)
    for k in range(1, lags[-1] + 1):
        sigma = stepper(sigma, n_base + k - 1)
        if k in lagset:
            record(k)

    arr_lags = np.array(lags)
    return G2Curve(
        n_base=n_base, lags=arr_lags,
        values=np.array([values[k] for k in lags]),
        pair=pair, ordering=ordering)


def pearson(series1, series2, window=None, start=None):
    """Windowed Pearson correlation of two series.

    With ``window`` given, uses ``series[start : start+window]``; ``start``
    defaults to the last full window.  Raises ZeroVariance when a windowed
    variance falls below 1e-14.
    """
    x = np.asarray(series1, dtype=float)
    y = np.asarray(series2, dtype=float)
    if x.shape != y.shape:
        raise ValueError("series must have equal length")
    if window is not None:
        if window < 2:
            raise ValueError("window must be >= 2")
        if start is None:
            start = len(x) - window
        if start < 0 or start + window > len(x):
            raise ValueError("window does not fit in the series")
        x = x[start:start + window]
        y = y[start:start + window]
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(np.mean(xc * xc))
    vy = float(np.mean(yc * yc))
    if vx < 1e-14 or vy < 1e-14:
        raise ZeroVariance(f"windowed variances ({vx:.2e}, {vy:.2e}) too small")
    return float(np.mean(xc * yc) / np.sqrt(vx * vy))


def bloch_vector(rho, spin_index):
    """Normalized (<s^x>, <s^y>, <s^z>) of one spin of the two-spin system."""
    ops = spin_ops(spin_index)
    return tuple(expval(rho, op) for op in ops)
