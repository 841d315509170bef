"""Implicit-midpoint residual of the fully discrete Fourier-Hermite Vlasov-Poisson system.

For each species, Hermite mode n and stored wavenumber k >= 0 the residual is

    (C[n,k]' - C[n,k]) / dt
      + (2 pi i k / L) (sqrt(n/2) alpha C[n-1,k]_mid + u C[n,k]_mid
                        + sqrt((n+1)/2) alpha C[n+1,k]_mid)
      - sqrt(2n) (q/m) (1/alpha) sum_l C[n-1,l]_mid E[k-l]_mid
      - nu_coll(n) C[n,k]_mid
      - S[n,k](t_mid)

where primes denote the candidate (next) level, `_mid` arithmetic means of the
two levels, and modes outside 0..Nv are closed with zeros.  The field is not
an independent unknown: E is eliminated through the Poisson equation

    E[k] = L / (2 pi i k) * sum_s q_s alpha_s C_s[0,k]   (k >= 1),  E[0] = 0,

and the midpoint field is the mean of the two level solves.  The convolution
runs over signed wavenumbers -Nx..Nx via conjugate symmetry, dropping outputs
with |k - l| > Nx (spectral truncation).

Unknown vectors are packed species-major, then n-major, then k, with real and
imaginary parts interleaved and the redundant k = 0 imaginary parts removed.

residual() is a pure function of (context, candidate); concurrent evaluation
is safe, which the finite-difference Jacobian-vector products rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import GridConfig, SpectralState

NEUTRALITY_TOL = 1e-10


class NeutralityError(ValueError):
    """Raised when the k = 0 Poisson mode is unsolvable (net charge)."""


def poisson_field(
    coeffs,
    charges,
    alphas,
    L: float,
    check_neutrality: bool = True,
) -> np.ndarray:
    """Field coefficients E[k], k >= 0, from the species coefficients.

    coeffs is a sequence of (Nv+1, Nx+1) complex matrices (or one stacked
    (Ns, Nv+1, Nx+1) array).  Neutrality of the k = 0 charge density is a
    solvability condition for genuine time-level states; the check can be
    suppressed for solver-internal evaluations at perturbed candidates.
    """
    coeffs = np.asarray(coeffs)
    rho = np.einsum("s,sk->k", np.asarray(charges) * np.asarray(alphas), coeffs[:, 0, :])
    if check_neutrality and abs(rho[0]) >= NEUTRALITY_TOL:
        raise NeutralityError(
            f"net charge density {rho[0]:.3e} violates quasineutrality"
        )
    E = np.zeros_like(rho)
    k = np.arange(1, rho.shape[0])
    E[1:] = rho[1:] * (L / (2j * np.pi * k))
    return E


def collision_coefficient(n: int, Nv: int, nu: float) -> float:
    """Hermite-diagonal collision damping rate; zero on modes n < 3."""
    if nu > 0.0 and Nv < 4:
        raise ValueError("collisional runs require Nv >= 4")
    if nu == 0.0:
        return 0.0
    return -nu * n * (n - 1) * (n - 2) / float((Nv - 1) * (Nv - 2) * (Nv - 3))


def _collision_vector(Nv: int, nu: float) -> np.ndarray:
    n = np.arange(Nv + 1, dtype=float)
    if nu == 0.0:
        return np.zeros(Nv + 1)
    return -nu * n * (n - 1) * (n - 2) / float((Nv - 1) * (Nv - 2) * (Nv - 3))


def signed_spectrum(v: np.ndarray) -> np.ndarray:
    """Extend k >= 0 coefficients to l = -Nx..Nx via conjugate symmetry."""
    return np.concatenate([np.conj(v[..., :0:-1]), v], axis=-1)


def _conv_matrix(b_full: np.ndarray, Nx: int) -> np.ndarray:
    """Matrix M with M[li, k] = b[k - l], l = li - Nx, truncated to |k-l| <= Nx.

    A row vector of signed coefficients times M yields the truncated
    convolution at output wavenumbers k = 0..Nx.
    """
    padded = np.concatenate([b_full, np.zeros(Nx, dtype=b_full.dtype)])
    windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * Nx + 1)
    return windows[: Nx + 1, ::-1].T


def convolve(akv: np.ndarray, bkv: np.ndarray) -> np.ndarray:
    """Truncated convolution sum_l a[l] b[k-l] over l = -Nx..Nx, output k = 0..Nx."""
    akv = np.asarray(akv)
    bkv = np.asarray(bkv)
    if akv.shape[-1] != bkv.shape[-1]:
        raise ValueError("operands must cover the same wavenumber range")
    Nx = akv.shape[-1] - 1
    return signed_spectrum(akv) @ _conv_matrix(signed_spectrum(bkv), Nx)


@dataclass
class ResidualContext:
    """Frozen per-step data: grid, species, previous level, optional source.

    Basis parameters are constant within a step; adaptation happens only
    between steps.  The source hook maps the midpoint time to a stacked
    (Ns, Nv+1, Nx+1) coefficient array.  In mms_mode the field is forced to
    zero (pure advection with source).
    """

    cfg: GridConfig
    charges: np.ndarray
    masses: np.ndarray
    alphas: np.ndarray
    shifts: np.ndarray
    prev: np.ndarray  # (Ns, Nv+1, Nx+1) complex
    t_prev: float
    dt: float
    source: Callable[[float], np.ndarray] | None = None
    mms_mode: bool = False
    e_prev: np.ndarray = field(init=False)
    _coll: np.ndarray = field(init=False)
    _ik: np.ndarray = field(init=False)
    _sq_dn: np.ndarray = field(init=False)
    _sq_up: np.ndarray = field(init=False)
    _sq_acc: np.ndarray = field(init=False)

    def __post_init__(self):
        Ns, Nv1, Nx1 = self.prev.shape
        Nv, Nx = Nv1 - 1, Nx1 - 1
        if Nv != self.cfg.Nv or Nx != self.cfg.Nx:
            raise ValueError("previous-state shape disagrees with grid config")
        if self.mms_mode:
            self.e_prev = np.zeros(Nx1, dtype=complex)
        else:
            # the previous level is a genuine time-level state: enforce
            # solvability of the k = 0 Poisson mode here once
            self.e_prev = poisson_field(
                self.prev, self.charges, self.alphas, self.cfg.L
            )
        n = np.arange(Nv + 1, dtype=float)
        self._coll = _collision_vector(Nv, self.cfg.nu)
        self._ik = 2j * np.pi / self.cfg.L * np.arange(Nx + 1)
        self._sq_dn = np.sqrt(0.5 * n)  # sqrt(n/2)
        self._sq_up = np.sqrt(0.5 * (n + 1.0))  # sqrt((n+1)/2)
        self._sq_acc = np.sqrt(2.0 * n)  # sqrt(2n)

    @property
    def n_species(self) -> int:
        return self.prev.shape[0]

    @property
    def n_unknowns(self) -> int:
        Ns, Nv1, Nx1 = self.prev.shape
        return Ns * Nv1 * (2 * Nx1 - 1)


def make_context(
    state: SpectralState,
    cfg: GridConfig,
    source: Callable[[float], np.ndarray] | None = None,
    mms_mode: bool = False,
    dt: float | None = None,
) -> ResidualContext:
    return ResidualContext(
        cfg=cfg,
        charges=np.array(state.charges),
        masses=np.array(state.masses),
        alphas=np.array([b.alpha for b in state.basis]),
        shifts=np.array([b.u for b in state.basis]),
        prev=state.stacked(),
        t_prev=state.time,
        dt=cfg.dt if dt is None else dt,
        source=source,
        mms_mode=mms_mode,
    )


def residual(ctx: ResidualContext, cand: np.ndarray) -> np.ndarray:
    """Midpoint residual for candidate next-level coefficients (stacked array)."""
    if cand.shape != ctx.prev.shape:
        raise ValueError(
            f"candidate shape {cand.shape} does not match unknowns {ctx.prev.shape}"
        )
    mid = 0.5 * (ctx.prev + cand)
    res = (cand - ctx.prev) / ctx.dt

    # streaming: ik (sqrt(n/2) alpha C[n-1] + u C[n] + sqrt((n+1)/2) alpha C[n+1])
    alpha = ctx.alphas[:, None, None]
    term = ctx.shifts[:, None, None] * mid
    term[:, 1:, :] += alpha * ctx._sq_dn[None, 1:, None] * mid[:, :-1, :]
    term[:, :-1, :] += alpha * ctx._sq_up[None, :-1, None] * mid[:, 1:, :]
    res += ctx._ik[None, None, :] * term

    if not ctx.mms_mode:
        e_cand = poisson_field(
            cand, ctx.charges, ctx.alphas, ctx.cfg.L, check_neutrality=False
        )
        e_mid = 0.5 * (ctx.e_prev + e_cand)
        conv = signed_spectrum(mid[:, :-1, :]) @ _conv_matrix(
            signed_spectrum(e_mid), ctx.cfg.Nx
        )
        res[:, 1:, :] -= (
            (ctx.charges / ctx.masses)[:, None, None]
            / alpha
            * ctx._sq_acc[None, 1:, None]
            * conv
        )

    if ctx.cfg.nu > 0.0:
        res -= ctx._coll[None, :, None] * mid

    if ctx.source is not None:
        res -= ctx.source(ctx.t_prev + 0.5 * ctx.dt)
    return res


def pack(coeffs: np.ndarray) -> np.ndarray:
    """Stacked complex coefficients -> real unknown vector (k=0 imag dropped)."""
    Ns, Nv1, Nx1 = coeffs.shape
    out = np.empty((Ns, Nv1, 2 * Nx1 - 1))
    out[..., 0] = coeffs[..., 0].real
    out[..., 1::2] = coeffs[..., 1:].real
    out[..., 2::2] = coeffs[..., 1:].imag
    return out.ravel()


def unpack(x: np.ndarray, Ns: int, Nv: int, Nx: int) -> np.ndarray:
    """Inverse of pack."""
    x = x.reshape(Ns, Nv + 1, 2 * Nx + 1)
    out = np.empty((Ns, Nv + 1, Nx + 1), dtype=complex)
    out[..., 0] = x[..., 0]
    out[..., 1:] = x[..., 1::2] + 1j * x[..., 2::2]
    return out


def packed_residual_fn(ctx: ResidualContext) -> Callable[[np.ndarray], np.ndarray]:
    """Residual as a map between packed real vectors, for the Newton solver."""
    Ns, Nv1, Nx1 = ctx.prev.shape

    def fn(x: np.ndarray) -> np.ndarray:
        cand = unpack(x, Ns, Nv1 - 1, Nx1 - 1)
        return pack(residual(ctx, cand))

    return fn
