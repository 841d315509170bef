"""Independent evaluation of the Hermite-Fourier expansion from snapshot data.

Deliberately written from scratch against the definitions (it doubles as a
cross-implementation check of the solver's reconstruction): the velocity
basis is built from the orthonormal harmonic-oscillator Hermite functions
phi_n, with the asymmetric Gaussian weight attached afterwards,

    psi_n(v) = pi^(-1/4) phi_n(xi) exp(-xi^2 / 2),   xi = (v - u) / alpha,

and the spatial sum runs over signed wavenumbers with the conjugate-symmetry
convention C[n, -k] = conj(C[n, k]).
"""

from __future__ import annotations

import numpy as np

from .io import Snapshot


def oscillator_functions(xi: np.ndarray, n_max: int) -> np.ndarray:
    """Orthonormal Hermite functions phi_0..phi_n_max, shape (n_max+1, len(xi))."""
    phi = np.empty((n_max + 1,) + xi.shape)
    with np.errstate(under="ignore"):
        phi[0] = np.pi**-0.25 * np.exp(-0.5 * xi * xi)
        if n_max >= 1:
            phi[1] = np.sqrt(2.0) * xi * phi[0]
        for n in range(1, n_max):
            phi[n + 1] = np.sqrt(2.0 / (n + 1)) * xi * phi[n] - np.sqrt(
                n / (n + 1.0)
            ) * phi[n - 1]
    return phi


def weighted_basis(v: np.ndarray, alpha: float, u: float, n_max: int) -> np.ndarray:
    """Asymmetrically weighted Hermite functions on the velocity grid."""
    xi = (np.asarray(v, dtype=float) - u) / alpha
    with np.errstate(under="ignore"):
        return np.pi**-0.25 * np.exp(-0.5 * xi * xi) * oscillator_functions(xi, n_max)


def evaluate_species(snap: Snapshot, species: int, x, v) -> np.ndarray:
    """Distribution of one species on the tensor grid x (rows) by v (columns)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    C = snap.coeffs[species]
    psi = weighted_basis(v, snap.alpha[species], snap.shift[species], snap.Nv)
    k = np.arange(-snap.Nx, snap.Nx + 1)
    phases = np.exp(2j * np.pi / snap.L * np.outer(x, k))  # (nx, 2Nx+1)
    C_signed = np.concatenate([np.conj(C[:, :0:-1]), C], axis=1)  # (Nv+1, 2Nx+1)
    amplitude = phases @ C_signed.T  # (nx, Nv+1)
    return amplitude.real @ psi


def evaluate(snap: Snapshot, x, v, species=None) -> np.ndarray:
    """Summed distribution of the requested species (default: electrons)."""
    if species is None:
        species = snap.electron_species()
    elif isinstance(species, int):
        species = [species]
    return sum(evaluate_species(snap, s, x, v) for s in species)


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two points to fit a slope")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
