"""Core containers and basis evaluation for the Hermite-Fourier spectral solver.

Velocity space uses asymmetrically weighted (AW) Hermite functions

    psi_n(v) = (pi 2^n n!)^(-1/2) H_n(xi) exp(-xi^2),   xi = (v - u) / alpha,

with per-species scaling alpha > 0 and shift u.  Space uses Fourier modes
eta_k(x) = exp(2*pi*i*k*x/L) on a periodic domain [0, L].  Only wavenumbers
k >= 0 are stored; negative-k coefficients follow from the reality condition
C[n, -k] = conj(C[n, k]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_hermite

SQRT_PI = math.sqrt(math.pi)
INV_SQRT_PI = 1.0 / SQRT_PI

# Gauss-Hermite node computation degrades past a few hundred points.
GAUSS_HERMITE_MAX_NODES = 200


class ReconstructionError(ValueError):
    """Raised when a reconstructed distribution has a non-real residue."""


@dataclass(frozen=True)
class HermiteBasisParams:
    """Scaling/shift pair of the Hermite velocity argument xi = (v - u)/alpha."""

    alpha: float
    u: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.u)):
            raise ValueError("Hermite basis parameters must be finite")
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be strictly positive, got {self.alpha}")


@dataclass(frozen=True)
class GridConfig:
    """Discretization parameters.

    L        spatial period (Debye lengths)
    Nv       highest Hermite index (modes n = 0..Nv)
    Nx       highest Fourier wavenumber (modes k = -Nx..Nx, k >= 0 stored)
    dt       time step (inverse plasma frequency units)
    t_final  end time
    nu       artificial collision coefficient
    u_tol    absolute tolerance gating shift updates
    alpha_tol relative tolerance gating scaling updates
    """

    L: float
    Nv: int
    Nx: int
    dt: float
    t_final: float
    nu: float = 0.0
    u_tol: float = 1e-2
    alpha_tol: float = 1e-1

    def __post_init__(self):
        if self.L <= 0.0:
            raise ValueError("L must be positive")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.Nv < 0 or self.Nx < 0:
            raise ValueError("Nv and Nx must be non-negative")
        if self.nu < 0.0:
            raise ValueError("nu must be non-negative")
        if self.u_tol < 0.0 or self.alpha_tol < 0.0:
            raise ValueError("tolerances must be non-negative")
        if self.nu > 0.0 and self.Nv < 4:
            # collision damping divides by (Nv-1)(Nv-2)(Nv-3)
            raise ValueError("collisional runs require Nv >= 4")


@dataclass(frozen=True)
class SpeciesConfig:
    """Physical description of one plasma species.

    init, when given, maps (Nv, Nx) to the initial complex coefficient
    matrix of shape (Nv+1, Nx+1).
    """

    q: float
    m: float
    basis: HermiteBasisParams
    init: Callable[[int, int], np.ndarray] | None = None


@dataclass
class SpectralState:
    """Hermite-Fourier coefficients of all species plus the electric field.

    coeffs[s] is complex with shape (Nv+1, Nx+1); row n holds Hermite mode n,
    column k holds Fourier wavenumber k >= 0.  efield[k] are the field
    coefficients with efield[0] == 0 (zero-mean gauge).  Coefficients at k = 0
    are real up to solver tolerance.
    """

    coeffs: list[np.ndarray]
    basis: list[HermiteBasisParams]
    efield: np.ndarray
    time: float
    L: float
    charges: tuple[float, ...]
    masses: tuple[float, ...]

    @property
    def n_species(self) -> int:
        return len(self.coeffs)

    @property
    def Nv(self) -> int:
        return self.coeffs[0].shape[0] - 1

    @property
    def Nx(self) -> int:
        return self.coeffs[0].shape[1] - 1

    def copy(self) -> "SpectralState":
        return SpectralState(
            coeffs=[c.copy() for c in self.coeffs],
            basis=list(self.basis),
            efield=self.efield.copy(),
            time=self.time,
            L=self.L,
            charges=self.charges,
            masses=self.masses,
        )

    def stacked(self) -> np.ndarray:
        """All species coefficients as one (Ns, Nv+1, Nx+1) array."""
        return np.stack(self.coeffs)


def eval_hermite_polys(xi, N: int) -> np.ndarray:
    """Physicists' Hermite polynomials H_0..H_N at xi by three-term recurrence.

    Returns an array of shape (N+1,) + shape(xi).
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    xi = np.asarray(xi, dtype=float)
    out = np.empty((N + 1,) + xi.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = 2.0 * xi
    for n in range(1, N):
        out[n + 1] = 2.0 * xi * out[n] - 2.0 * n * out[n - 1]
    return out


def eval_aw_hermite(v, params: HermiteBasisParams, N: int) -> np.ndarray:
    """AW Hermite functions psi_0..psi_N at velocity v.

    The recurrence runs on scaled iterates (2^n n!)^(-1/2) H_n(xi) e^(-xi^2/2),
    which stay O(1) for all n; the bare H_n would overflow near n ~ 150.
    Returns shape (N+1,) + shape(v).
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    v = np.asarray(v, dtype=float)
    xi = (v - params.u) / params.alpha
    # far tails underflow to exactly zero; that is the intended behavior
    with np.errstate(under="ignore"):
        half_gauss = np.exp(-0.5 * xi * xi)
        scaled = np.empty((N + 1,) + xi.shape)
        scaled[0] = half_gauss
        if N >= 1:
            scaled[1] = math.sqrt(2.0) * xi * half_gauss
        for n in range(1, N):
            scaled[n + 1] = (
                math.sqrt(2.0 / (n + 1)) * xi * scaled[n]
                - math.sqrt(n / (n + 1.0)) * scaled[n - 1]
            )
        return INV_SQRT_PI * half_gauss * scaled


def fourier_phases(x, Nx: int, L: float) -> np.ndarray:
    """eta_k(x) = exp(2*pi*i*k*x/L) for k = 0..Nx, shape (len(x), Nx+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(Nx + 1)
    return np.exp(2j * np.pi / L * np.outer(x, k))


def reconstruct_f(
    state: SpectralState,
    species: int,
    x_grid,
    v_grid,
    imag_tol: float = 1e-8,
) -> np.ndarray:
    """Point values of the distribution function on x_grid (x) v_grid.

    Negative wavenumbers enter through conjugate symmetry, so the only
    possible imaginary residue comes from non-real k = 0 coefficients; it is
    checked against imag_tol (relative) and discarded.
    """
    x_grid = np.atleast_1d(np.asarray(x_grid, dtype=float))
    v_grid = np.atleast_1d(np.asarray(v_grid, dtype=float))
    C = state.coeffs[species]
    Nv, Nx = C.shape[0] - 1, C.shape[1] - 1
    psi = eval_aw_hermite(v_grid, state.basis[species], Nv)  # (Nv+1, nv)

    # G[x, n] = C[n,0] + 2 Re sum_{k>=1} C[n,k] eta_k(x); the k=0 imaginary
    # part is excluded from f and measured as the symmetry residue.
    G = np.broadcast_to(C[:, 0].real, (len(x_grid), Nv + 1)).copy()
    if Nx >= 1:
        eta = fourier_phases(x_grid, Nx, state.L)[:, 1:]  # (nx, Nx)
        G += 2.0 * (eta @ C[:, 1:].T).real
    f = G @ psi

    imag_profile = C[:, 0].imag @ psi  # independent of x
    scale = max(float(np.max(np.abs(f))), 1e-300)
    residue = float(np.max(np.abs(imag_profile))) / scale
    if residue > imag_tol:
        raise ReconstructionError(
            f"imaginary residue {residue:.3e} exceeds {imag_tol:.1e}; "
            "k=0 coefficients are not real"
        )
    return f


def gauss_hermite_rule(N: int) -> tuple[np.ndarray, np.ndarray]:
    """N-point Gauss-Hermite nodes/weights for weight exp(-x^2).

    Exact for polynomials up to degree 2N-1.  N is capped at
    GAUSS_HERMITE_MAX_NODES, past which node computation loses accuracy.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > GAUSS_HERMITE_MAX_NODES:
        raise ValueError(
            f"Gauss-Hermite rule limited to {GAUSS_HERMITE_MAX_NODES} nodes, got {N}"
        )
    nodes, weights = roots_hermite(N)
    return nodes, weights


def validate_state(state: SpectralState, k0_imag_tol: float = 1e-8) -> None:
    """Check structural invariants: shapes, zero-mean field, real k=0 rows."""
    shape = state.coeffs[0].shape
    for c in state.coeffs:
        if c.shape != shape:
            raise ValueError("species coefficient matrices differ in shape")
    if state.efield.shape != (shape[1],):
        raise ValueError("field coefficient vector has wrong length")
    if state.efield[0] != 0.0:
        raise ValueError("zero-mean gauge violated: efield[0] != 0")
    for s, c in enumerate(state.coeffs):
        scale = max(float(np.max(np.abs(c))), 1e-300)
        if float(np.max(np.abs(c[:, 0].imag))) > k0_imag_tol * scale:
            raise ValueError(f"species {s} has non-real k=0 coefficients")
