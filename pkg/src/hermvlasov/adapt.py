"""Physics-based update of the Hermite parameters (u, alpha) with tolerance gating.

The candidate parameters come from the spatially averaged first and second
moments of the distribution, which reduce to ratios of the k = 0 coefficients:

    u_new     = u + (alpha / sqrt(2)) * C[1,0]/C[0,0]
    alpha_new = alpha * sqrt(1 + sqrt(2) C[2,0]/C[0,0] - (C[1,0]/C[0,0])^2)

Each parameter is gated by its own tolerance; shift and scaling update
independently of one another.  A non-positive radicand (possible because the
spectral discretization does not preserve positivity) keeps the previous
alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import GridConfig, HermiteBasisParams, SpectralState

# Radicand at or below this is treated as an inadmissible (complex) scaling.
RADICAND_EPS = 1e-12


class ZeroDensityError(ValueError):
    """Raised when the spatially averaged density C[0,0] vanishes."""


@dataclass(frozen=True)
class AdaptDecision:
    new_params: HermiteBasisParams
    update_u: bool
    update_alpha: bool
    radicand: float  # diagnostic; NaN when not computed


def propose_params(state: SpectralState, species: int) -> AdaptDecision:
    """Candidate (alpha, u) for one species from its k = 0 coefficient ratios."""
    C = state.coeffs[species]
    Nv = C.shape[0] - 1
    c00 = float(C[0, 0].real)
    if c00 == 0.0:
        raise ZeroDensityError(f"species {species} has zero average density")
    r1 = float(C[1, 0].real) / c00 if Nv >= 1 else 0.0
    r2 = float(C[2, 0].real) / c00 if Nv >= 2 else 0.0

    old = state.basis[species]
    radicand = 1.0 + math.sqrt(2.0) * r2 - r1 * r1
    u_new = old.u + old.alpha / math.sqrt(2.0) * r1
    if radicand <= RADICAND_EPS:
        # sqrt would be ~0 or complex; fall back to the previous scaling
        return AdaptDecision(
            new_params=HermiteBasisParams(alpha=old.alpha, u=u_new),
            update_u=True,
            update_alpha=False,
            radicand=radicand,
        )
    alpha_new = old.alpha * math.sqrt(radicand)
    return AdaptDecision(
        new_params=HermiteBasisParams(alpha=alpha_new, u=u_new),
        update_u=True,
        update_alpha=True,
        radicand=radicand,
    )


def gate_update(
    old: HermiteBasisParams, proposed: HermiteBasisParams, cfg: GridConfig
) -> AdaptDecision:
    """Tolerance gate: accept each parameter only if it moved far enough.

    new_params holds the effective parameters, mixing old and proposed
    according to which gates fired.
    """
    update_u = abs(old.u - proposed.u) >= cfg.u_tol
    update_alpha = abs(old.alpha - proposed.alpha) / abs(old.alpha) >= cfg.alpha_tol
    effective = HermiteBasisParams(
        alpha=proposed.alpha if update_alpha else old.alpha,
        u=proposed.u if update_u else old.u,
    )
    return AdaptDecision(
        new_params=effective,
        update_u=update_u,
        update_alpha=update_alpha,
        radicand=float("nan"),
    )
