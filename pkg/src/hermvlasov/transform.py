"""Conservation-preserving projection between Hermite bases with different (alpha, u).

The projection of a spectral expansion from basis (alpha_old, u_old) onto
basis (alpha_new, u_new) is the weighted-L2 orthogonal projection; its matrix
is lower triangular with entries (a = alpha_new/alpha_old, b = (u_new -
u_old)/alpha_old, K_{n,m} = 2^((m-n)/2) sqrt(n!/m!))

    P[n,m] = K_{n,m} a^-(m+1) * sum over l in [m,n], l-m even, of
             (-2b/a)^(n-l) (1/a^2 - 1)^((l-m)/2) / ((n-l)! ((l-m)/2)!)

with the convention 0^0 = 1 so that pure-shift, pure-scaling and identity
changes are the natural special cases.  The entries are built here by a
two-term recurrence down each column (O(Nv^2) total, no factorial overflow):
with Q[n,m] := P[n,m] a^(m+1),

    Q[m,m]   = 1
    Q[m+1,m] = B sqrt((m+1)/2)
    Q[n,m]   = (B sqrt(n/2) Q[n-1,m] + A sqrt(n(n-1)) Q[n-2,m]) / (n - m),

where B = -2b/a and A = 1/a^2 - 1.  Applying the projection row by row
preserves mass, momentum, kinetic and potential energy exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SQRT_PI, HermiteBasisParams, SpectralState, gauss_hermite_rule

# Scaling ratios far outside any physical adaptation regime are rejected.
MIN_SCALE_RATIO = 1e-6
MAX_SCALE_RATIO = 1e6

_PI_LD = np.longdouble("3.14159265358979323846264338327950288")


@dataclass(frozen=True)
class TransformMatrix:
    """Lower-triangular change-of-basis matrix plus the ratios that built it."""

    entries: np.ndarray  # (Nv+1, Nv+1), real
    a: float  # alpha_new / alpha_old
    b: float  # (u_new - u_old) / alpha_old

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def build_transform(
    old: HermiteBasisParams, new: HermiteBasisParams, Nv: int
) -> TransformMatrix:
    """Projection matrix from basis `old` onto basis `new` for modes 0..Nv."""
    if Nv < 0:
        raise ValueError("Nv must be non-negative")
    a = new.alpha / old.alpha
    b = (new.u - old.u) / old.alpha
    if not (MIN_SCALE_RATIO < a < MAX_SCALE_RATIO):
        raise ValueError(f"scaling ratio a={a:.3e} outside admissible range")

    B = -2.0 * b / a
    A = 1.0 / (a * a) - 1.0
    Q = np.zeros((Nv + 1, Nv + 1))
    np.fill_diagonal(Q, 1.0)
    for n in range(1, Nv + 1):
        m = np.arange(n)
        acc = B * math.sqrt(0.5 * n) * Q[n - 1, :n]
        if n >= 2:
            acc = acc + A * math.sqrt(n * (n - 1.0)) * Q[n - 2, :n]
        Q[n, :n] = acc / (n - m)

    col_scale = a ** -(np.arange(Nv + 1) + 1.0)
    return TransformMatrix(entries=Q * col_scale[None, :], a=a, b=b)


def apply_transform(
    P: TransformMatrix, state: SpectralState, species: int
) -> SpectralState:
    """Project one species onto its new basis; field and time are unchanged."""
    C = state.coeffs[species]
    if P.entries.shape[0] != C.shape[0]:
        raise ValueError(
            f"transform size {P.entries.shape[0]} does not match Nv+1={C.shape[0]}"
        )
    old = state.basis[species]
    out = state.copy()
    out.coeffs[species] = P.entries @ C
    out.basis[species] = HermiteBasisParams(
        alpha=P.a * old.alpha, u=old.u + P.b * old.alpha
    )
    return out


def quadrature_transform_entry(
    old: HermiteBasisParams,
    new: HermiteBasisParams,
    n: int,
    m: int,
    n_nodes: int | None = None,
) -> float:
    """Defining integral of the transform entry, by Gauss-Hermite quadrature.

    Test oracle: integrates psi_m^old(v) psi_n^new(v) w_new(v) dv in the old
    xi variable after absorbing the exponentials analytically,

        (alpha_old / (alpha_new sqrt(pi)))
            * int h_m(xi) h_n((xi - b)/a) exp(-xi^2) dxi,

    with h_j the square-root-normalized Hermite polynomials.  Nodes, weights
    and the sum are carried in extended precision: entries reach a^-(m+1)
    magnitudes, and plain double summation would leave ~1e-9 noise, too
    coarse to referee the closed forms.
    """
    if n < 0 or m < 0:
        raise ValueError("n, m must be non-negative")
    if max(n, m) > 40:
        raise ValueError("quadrature oracle limited to n, m <= 40")
    a = np.longdouble(new.alpha) / np.longdouble(old.alpha)
    b = (np.longdouble(new.u) - np.longdouble(old.u)) / np.longdouble(old.alpha)
    if n_nodes is None:
        n_nodes = n + m + 8
    nodes, weights = _gauss_hermite_longdouble(n_nodes)
    hm = _normalized_hermite(nodes, m)[m]
    hn = _normalized_hermite((nodes - b) / a, n)[n]
    total = np.sum(weights * hm * hn)
    prefactor = np.longdouble(old.alpha) / (np.longdouble(new.alpha) * np.sqrt(_PI_LD))
    return float(prefactor * total)


def _gauss_hermite_longdouble(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite rule in extended precision.

    Double-precision nodes are polished by Newton iteration on the normalized
    recurrence (h_N' = sqrt(2N) h_{N-1}); weights follow from
    w_i = sqrt(pi) / (N h_{N-1}(x_i)^2).
    """
    nodes64, _ = gauss_hermite_rule(N)
    x = nodes64.astype(np.longdouble)
    for _ in range(3):
        h = _normalized_hermite(x, N)
        x = x - h[N] / (np.sqrt(np.longdouble(2 * N)) * h[N - 1])
    h = _normalized_hermite(x, N)
    weights = np.sqrt(_PI_LD) / (N * h[N - 1] ** 2)
    return x, weights


def _normalized_hermite(x: np.ndarray, N: int) -> np.ndarray:
    """(2^n n!)^(-1/2) H_n(x) for n = 0..N; stays representable to n ~ 300."""
    out = np.empty((N + 1,) + x.shape, dtype=x.dtype)
    out[0] = 1.0
    if N >= 1:
        out[1] = np.sqrt(x.dtype.type(2.0)) * x
    for k in range(1, N):
        out[k + 1] = (
            np.sqrt(x.dtype.type(2.0 / (k + 1))) * x * out[k]
            - np.sqrt(x.dtype.type(k / (k + 1.0))) * out[k - 1]
        )
    return out
