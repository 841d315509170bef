"""Conserved quantities, field norms, distribution extrema and L2 errors.

All quantities are dimensionless under the plasma normalization (time in
inverse electron plasma frequencies, length in Debye lengths, eps_0 = 1).
The spatially integrated moments reduce to the k = 0 coefficients:

    M   = m alpha L Re C[0,0]
    P   = u M + m alpha^2 L Re C[1,0] / sqrt(2)
    E_k = (m alpha L / 2) ((u^2 + alpha^2/2) Re C[0,0]
          + sqrt(2) u alpha Re C[1,0] + alpha^2/sqrt(2) Re C[2,0])
    E_p = (L/2) sum_k (2 - delta_k0) |E_k|^2        (Parseval)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import SpectralState, reconstruct_f

SQRT2 = math.sqrt(2.0)


def mass(state: SpectralState, species: int) -> float:
    b = state.basis[species]
    return state.masses[species] * b.alpha * state.L * float(
        state.coeffs[species][0, 0].real
    )


def momentum_species(state: SpectralState, species: int) -> float:
    b = state.basis[species]
    p = b.u * mass(state, species)
    if state.Nv >= 1:
        p += (
            state.masses[species]
            * b.alpha**2
            * state.L
            * float(state.coeffs[species][1, 0].real)
            / SQRT2
        )
    return p


def momentum(state: SpectralState) -> float:
    """Total momentum, summed over species."""
    return sum(momentum_species(state, s) for s in range(state.n_species))


def kinetic_energy(state: SpectralState, species: int) -> float:
    b = state.basis[species]
    C = state.coeffs[species]
    acc = (b.u**2 + 0.5 * b.alpha**2) * float(C[0, 0].real)
    if state.Nv >= 1:
        acc += SQRT2 * b.u * b.alpha * float(C[1, 0].real)
    if state.Nv >= 2:
        acc += b.alpha**2 / SQRT2 * float(C[2, 0].real)
    return 0.5 * state.masses[species] * b.alpha * state.L * acc


def potential_energy(state: SpectralState) -> float:
    w = np.full(state.Nx + 1, 2.0)
    w[0] = 1.0
    return 0.5 * state.L * float(np.sum(w * np.abs(state.efield) ** 2))


def total_energy(state: SpectralState) -> float:
    return potential_energy(state) + sum(
        kinetic_energy(state, s) for s in range(state.n_species)
    )


def field_l2_norm(state: SpectralState) -> float:
    """L2 norm of E over the period, sqrt(int E^2 dx)."""
    return math.sqrt(2.0 * potential_energy(state))


def f_extrema(
    state: SpectralState,
    species: int | Sequence[int],
    window: tuple[float, float] = (-3.0, 3.0),
    n_v: int = 400,
    n_x: int = 256,
) -> tuple[float, float]:
    """(min, max) of the reconstructed distribution on a diagnostic grid.

    species may be a single index or a sequence whose reconstructions are
    summed (e.g. the two counter-streaming electron beams).
    """
    if isinstance(species, (int, np.integer)):
        species = [int(species)]
    x = np.linspace(0.0, state.L, n_x, endpoint=False)
    v = np.linspace(window[0], window[1], n_v)
    f = sum(reconstruct_f(state, s, x, v) for s in species)
    return float(np.min(f)), float(np.max(f))


def l2_error(
    state: SpectralState,
    species: int,
    reference: Callable[[np.ndarray, np.ndarray], np.ndarray],
    window: tuple[float, float] | None = None,
    n_x: int = 256,
    n_v: int = 512,
    relative: bool = True,
) -> float:
    """Discrete L2 norm of (reconstruction - reference) on a tensor grid.

    reference(x, v) must return the exact values with shape (n_x, n_v).
    The default velocity window is [u - 8 alpha, u + 8 alpha]; trapezoidal
    weights are used in both directions.
    """
    b = state.basis[species]
    if window is None:
        window = (b.u - 8.0 * b.alpha, b.u + 8.0 * b.alpha)
    x = np.linspace(0.0, state.L, n_x, endpoint=False)
    v = np.linspace(window[0], window[1], n_v)
    f_num = reconstruct_f(state, species, x, v)
    f_ref = np.asarray(reference(x, v), dtype=float)
    if f_ref.shape != f_num.shape:
        raise ValueError("reference grid values have the wrong shape")

    wx = np.full(n_x, state.L / n_x)  # periodic in x: uniform weights
    wv = np.full(n_v, v[1] - v[0])
    wv[0] *= 0.5
    wv[-1] *= 0.5
    weight = np.outer(wx, wv)
    err = math.sqrt(float(np.sum(weight * (f_num - f_ref) ** 2)))
    if not relative:
        return err
    ref_norm = math.sqrt(float(np.sum(weight * f_ref**2)))
    return err / ref_norm


def coefficient_l2_error(
    state: SpectralState,
    species: int,
    exact: dict[tuple[int, int], complex],
    relative: bool = True,
) -> float:
    """Relative L2(Omega) error in the solver's own weighted norm.

    In the weighted inner product the Hermite-Fourier basis is orthonormal,
    so the error is the coefficient-vector l2 distance with conjugate-pair
    weights 2 - delta_k0.  The reference coefficients (keys (n, k), k >= 0
    entries used) must refer to the same basis as the state.
    """
    C = state.coeffs[species]
    Cex = np.zeros_like(C)
    for (n, k), val in exact.items():
        if k >= 0:
            Cex[n, k] = val
    w = np.full(C.shape[1], 2.0)
    w[0] = 1.0
    err = math.sqrt(float(np.sum(w * np.abs(C - Cex) ** 2)))
    if not relative:
        return err
    return err / math.sqrt(float(np.sum(w * np.abs(Cex) ** 2)))


@dataclass
class DiagnosticsRecord:
    """Per-step conserved quantities, basis parameters and field measures.

    Error fields are relative to the t = 0 record: mass_err is the largest
    per-species relative mass drift; momentum_err is normalized by the sum of
    per-species initial |P_s| (the natural scale when the total initial
    momentum vanishes, as in the symmetric two-stream setup); energy_err is
    relative to the initial total energy.
    """

    t: float
    mass: tuple[float, ...]
    momentum: tuple[float, ...]
    kinetic: tuple[float, ...]
    alpha: tuple[float, ...]
    u: tuple[float, ...]
    potential: float
    mass_err: float
    momentum_err: float
    energy_err: float
    f_min: float
    f_max: float
    e_l2: float

    @property
    def total_momentum(self) -> float:
        return sum(self.momentum)

    @property
    def total_energy(self) -> float:
        return sum(self.kinetic) + self.potential


def compute_record(
    state: SpectralState,
    reference: DiagnosticsRecord | None = None,
    extrema_species: Sequence[int] | None = None,
    window: tuple[float, float] = (-3.0, 3.0),
    n_v: int = 400,
    n_x: int = 256,
) -> DiagnosticsRecord:
    """Evaluate all diagnostics; pass the t = 0 record to fill error fields."""
    ns = state.n_species
    masses = tuple(mass(state, s) for s in range(ns))
    momenta = tuple(momentum_species(state, s) for s in range(ns))
    kinetics = tuple(kinetic_energy(state, s) for s in range(ns))
    epot = potential_energy(state)
    if extrema_species is None:
        extrema_species = list(range(ns))
    fmin, fmax = f_extrema(state, extrema_species, window=window, n_v=n_v, n_x=n_x)

    mass_err = mom_err = en_err = 0.0
    if reference is not None:
        mass_err = max(
            abs(m1 - m0) / abs(m0) if m0 != 0.0 else abs(m1 - m0)
            for m0, m1 in zip(reference.mass, masses)
        )
        p_scale = sum(abs(p) for p in reference.momentum)
        if p_scale == 0.0:
            p_scale = 1.0
        mom_err = abs(sum(momenta) - reference.total_momentum) / p_scale
        e0 = reference.total_energy
        e_scale = abs(e0) if e0 != 0.0 else 1.0
        en_err = abs(sum(kinetics) + epot - e0) / e_scale

    return DiagnosticsRecord(
        t=state.time,
        mass=masses,
        momentum=momenta,
        kinetic=kinetics,
        alpha=tuple(b.alpha for b in state.basis),
        u=tuple(b.u for b in state.basis),
        potential=epot,
        mass_err=mass_err,
        momentum_err=mom_err,
        energy_err=en_err,
        f_min=fmin,
        f_max=fmax,
        e_l2=field_l2_norm(state),
    )
