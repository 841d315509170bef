"""Initial conditions and manufactured-solution machinery.

Two-stream instability: two drifting Maxwellian electron beams (evolved as
separate species, each with its own adaptive basis) and one neutralizing
Maxwellian ion background.

Manufactured solution: the exact distribution

    f_ex(t, x, v) = (2 - cos(2x - 2 pi t)) pi^(-1/2) exp(-((v - w(t))/beta(t))^2)

on [0, 2 pi] solves a pure advection problem with a source and zero field;
its expansion in the basis (beta(t), w(t)) has the three coefficients
C[0,0] = 2, C[0,+-2] = -exp(-+ 2 pi i t)/2, and the source is supported on
Hermite modes 0..2 and wavenumbers {0, +-2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    GridConfig,
    HermiteBasisParams,
    SpeciesConfig,
    SpectralState,
    eval_aw_hermite,
    gauss_hermite_rule,
)
from .residual import poisson_field
from .transform import build_transform

SQRT2 = math.sqrt(2.0)


def assemble_state(cfg: GridConfig, species: list[SpeciesConfig]) -> SpectralState:
    """Build the initial state from species configs; the field comes from Poisson."""
    coeffs = []
    for sp in species:
        if sp.init is None:
            C = np.zeros((cfg.Nv + 1, cfg.Nx + 1), dtype=complex)
        else:
            C = np.asarray(sp.init(cfg.Nv, cfg.Nx), dtype=complex)
            if C.shape != (cfg.Nv + 1, cfg.Nx + 1):
                raise ValueError("species init returned a wrongly shaped matrix")
        coeffs.append(C)
    basis = [sp.basis for sp in species]
    charges = tuple(sp.q for sp in species)
    masses = tuple(sp.m for sp in species)
    efield = poisson_field(
        np.stack(coeffs), charges, [b.alpha for b in basis], cfg.L
    )
    return SpectralState(
        coeffs=coeffs,
        basis=basis,
        efield=efield,
        time=0.0,
        L=cfg.L,
        charges=charges,
        masses=masses,
    )


def _maxwellian_beam(density: float, alpha: float, eps: float):
    """Initial coefficient generator: n0/alpha with a cosine perturbation on k=1."""

    def init(Nv: int, Nx: int) -> np.ndarray:
        C = np.zeros((Nv + 1, Nx + 1), dtype=complex)
        C[0, 0] = density / alpha
        if eps != 0.0:
            C[0, 1] = density * eps / (4.0 * alpha)
        return C

    return init


def two_stream_init(
    cfg: GridConfig,
    eps: float = 1e-3,
    n0: tuple[float, float] = (0.5, 0.5),
    alpha_e: tuple[float, float] = (0.5, 0.5),
    u_e: tuple[float, float] = (1.0, -1.0),
    mass_ratio: float = 1836.0,
    temp_ratio: float = 1.0,
) -> SpectralState:
    """Two counter-streaming electron beams plus a neutralizing ion background.

    Each beam starts as n0/alpha on its own Maxwellian basis with a cosine
    density perturbation of relative amplitude eps/2 on wavenumber 1; the ions
    are unperturbed.  The resulting state is exactly quasineutral and carries
    zero total momentum for the symmetric defaults.
    """
    if cfg.Nx < 1:
        raise ValueError("two-stream setup needs Nx >= 1 for the perturbation")
    alpha_i = math.sqrt(2.0 * temp_ratio / mass_ratio)
    species = [
        SpeciesConfig(
            q=-1.0,
            m=1.0,
            basis=HermiteBasisParams(alpha=al, u=uu),
            init=_maxwellian_beam(dens, al, eps),
        )
        for dens, al, uu in zip(n0, alpha_e, u_e)
    ]
    species.append(
        SpeciesConfig(
            q=1.0,
            m=mass_ratio,
            basis=HermiteBasisParams(alpha=alpha_i, u=0.0),
            init=_maxwellian_beam(1.0, alpha_i, 0.0),
        )
    )
    return assemble_state(cfg, species)


def expansion_demo(
    u0: float,
    alpha0: float = 1.0,
    n_modes: int = 30,
    v_range: tuple[float, float] = (-2.0, 5.0),
    n_points: int = 2000,
    n_quad: int = 64,
) -> float:
    """Expansion error of a fixed-basis representation of a shifted Maxwellian.

    exp(-((v - u0)/alpha0)^2) is projected onto n_modes AW Hermite functions
    centered at (alpha, u) = (1, 0) by weighted Gauss-Hermite quadrature and
    reconstructed on an equispaced velocity grid.  Returns the relative error
    in the squared-L2 sense, sum((f_rec - f)^2) / sum(f^2), the convention of
    the reference curve this demo reproduces (a centered Gaussian gives ~0,
    u0 = 2.4 gives ~2e-2, u0 = 3 diverges to ~1e4).  Illustrates the
    catastrophic accuracy loss of a badly centered basis.
    """
    nodes, weights = gauss_hermite_rule(n_quad)
    # C_n = sqrt(pi) (pi 2^n n!)^(-1/2) int H_n(v) f(v) dv reduces to the
    # integral of f against the root-normalized polynomials; substituting the
    # Maxwellian's own variable makes the Gauss-Hermite weight exact
    v_nodes = u0 + alpha0 * nodes
    hvals = _normalized_hermite_rows(v_nodes, n_modes - 1)
    coeff = alpha0 * (hvals @ weights)

    v = np.linspace(v_range[0], v_range[1], n_points)
    psi = eval_aw_hermite(v, HermiteBasisParams(1.0, 0.0), n_modes - 1)
    f_rec = coeff @ psi
    f_exact = np.exp(-(((v - u0) / alpha0) ** 2))
    return float(np.sum((f_rec - f_exact) ** 2) / np.sum(f_exact**2))


def _normalized_hermite_rows(x: np.ndarray, N: int) -> np.ndarray:
    out = np.empty((N + 1,) + x.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = SQRT2 * x
    for k in range(1, N):
        out[k + 1] = (
            math.sqrt(2.0 / (k + 1)) * x * out[k]
            - math.sqrt(k / (k + 1.0)) * out[k - 1]
        )
    return out


@dataclass(frozen=True)
class MmsProfile:
    """Time profiles beta(t), w(t) of the manufactured solution and derivatives."""

    beta_fn: Callable[[float], float]
    w_fn: Callable[[float], float]
    dbeta_fn: Callable[[float], float]
    dw_fn: Callable[[float], float]


def mms_profile(case: str) -> MmsProfile:
    """Named manufactured-solution profiles.

    "1"   beta = 1,              w = 0   (solution in the solver's own basis)
    "2"   beta = 1 + t,          w = 0   (linearly widening Maxwellian)
    "3"   alias of "2" (run with adaptivity on)
    "tol" beta = 1.2 + tanh(t-5), w = 0  (tolerance study profile)
    """
    if case in ("1",):
        return MmsProfile(lambda t: 1.0, lambda t: 0.0, lambda t: 0.0, lambda t: 0.0)
    if case in ("2", "3"):
        return MmsProfile(
            lambda t: 1.0 + t, lambda t: 0.0, lambda t: 1.0, lambda t: 0.0
        )
    if case == "tol":
        return MmsProfile(
            lambda t: 1.2 + math.tanh(t - 5.0),
            lambda t: 0.0,
            lambda t: 1.0 / math.cosh(t - 5.0) ** 2,
            lambda t: 0.0,
        )
    raise ValueError(f"unknown manufactured-solution case {case!r}")


def mms_exact_coeffs(profile: MmsProfile, t: float) -> dict[tuple[int, int], complex]:
    """Nonzero expansion coefficients of the exact solution in basis (beta, w)."""
    phase = np.exp(-2j * np.pi * t)
    return {
        (0, 0): 2.0 + 0.0j,
        (0, 2): -0.5 * phase,
        (0, -2): -0.5 * np.conj(phase),
    }


def mms_source_coeffs(profile: MmsProfile, t: float) -> dict[tuple[int, int], complex]:
    """Nonzero expansion coefficients R[n,k] of the source in basis (beta, w)."""
    beta = profile.beta_fn(t)
    w = profile.w_fn(t)
    dbeta = profile.dbeta_fn(t)
    dw = profile.dw_fn(t)
    phase = np.exp(-2j * np.pi * t)
    cphase = np.conj(phase)
    db = dbeta / beta
    dwb = dw / beta
    return {
        (0, 0): 2.0 * db + 0.0j,
        (0, 2): (1j * np.pi - 1j * w - 0.5 * db) * phase,
        (0, -2): (1j * w - 1j * np.pi - 0.5 * db) * cphase,
        (1, 0): 2.0 * SQRT2 * dwb + 0.0j,
        (1, 2): -(1j * beta + dwb) / SQRT2 * phase,
        (1, -2): (1j * beta - dwb) / SQRT2 * cphase,
        (2, 0): 2.0 * SQRT2 * db + 0.0j,
        (2, 2): -db / SQRT2 * phase,
        (2, -2): -db / SQRT2 * cphase,
    }


def mms_projected_source(
    profile: MmsProfile,
    t: float,
    basis: HermiteBasisParams,
    Nv: int,
    Nx: int,
) -> np.ndarray:
    """Source coefficients projected from basis (beta(t), w(t)) onto the solver basis.

    Returns the (Nv+1, Nx+1) array with nonzero columns k in {0, 2}; entries
    S[n,k] = sum_{m<=2} P[n,m] R[m,k], the transform filling in modes n > 2
    whenever the bases differ.
    """
    if Nv < 2 or Nx < 2:
        raise ValueError("manufactured source needs Nv >= 2 and Nx >= 2")
    R = mms_source_coeffs(profile, t)
    source_basis = HermiteBasisParams(alpha=profile.beta_fn(t), u=profile.w_fn(t))
    P = build_transform(source_basis, basis, Nv).entries[:, :3]
    out = np.zeros((Nv + 1, Nx + 1), dtype=complex)
    out[:, 0] = P @ np.array([R[(0, 0)], R[(1, 0)], R[(2, 0)]])
    out[:, 2] = P @ np.array([R[(0, 2)], R[(1, 2)], R[(2, 2)]])
    return out


def mms_exact_f(profile: MmsProfile, t: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Grid evaluator of the exact manufactured distribution at time t."""
    beta = profile.beta_fn(t)
    w = profile.w_fn(t)

    def f(x: np.ndarray, v: np.ndarray) -> np.ndarray:
        X = np.asarray(x, dtype=float)[:, None]
        V = np.asarray(v, dtype=float)[None, :]
        return (
            (2.0 - np.cos(2.0 * X - 2.0 * np.pi * t))
            / math.sqrt(math.pi)
            * np.exp(-(((V - w) / beta) ** 2))
        )

    return f


def mms_initial_state(profile: MmsProfile, cfg: GridConfig) -> SpectralState:
    """Single-species initial state for manufactured-solution runs (E = 0)."""
    if cfg.Nv < 2 or cfg.Nx < 2:
        raise ValueError("manufactured runs need Nv >= 2 and Nx >= 2")
    basis = HermiteBasisParams(alpha=profile.beta_fn(0.0), u=profile.w_fn(0.0))
    C = np.zeros((cfg.Nv + 1, cfg.Nx + 1), dtype=complex)
    for (n, k), val in mms_exact_coeffs(profile, 0.0).items():
        if k >= 0:
            C[n, k] = val
    return SpectralState(
        coeffs=[C],
        basis=[basis],
        efield=np.zeros(cfg.Nx + 1, dtype=complex),
        time=0.0,
        L=cfg.L,
        charges=(-1.0,),
        masses=(1.0,),
    )
