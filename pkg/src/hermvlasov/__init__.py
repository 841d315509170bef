"""Adaptive Hermite-Fourier spectral solver for the 1D-1V Vlasov-Poisson system."""

__version__ = "0.1.0"

from .core import (
    GridConfig,
    HermiteBasisParams,
    SpeciesConfig,
    SpectralState,
    eval_aw_hermite,
    eval_hermite_polys,
    gauss_hermite_rule,
    reconstruct_f,
)
from .transform import TransformMatrix, apply_transform, build_transform
from .adapt import AdaptDecision, gate_update, propose_params
from .residual import (
    NeutralityError,
    ResidualContext,
    collision_coefficient,
    convolve,
    make_context,
    poisson_field,
    residual,
)
from .solver import SolverConfig, gmres, newton_solve
from .diagnostics import (
    DiagnosticsRecord,
    compute_record,
    f_extrema,
    kinetic_energy,
    l2_error,
    mass,
    momentum,
    potential_energy,
)
from .scenarios import (
    MmsProfile,
    expansion_demo,
    mms_exact_coeffs,
    mms_exact_f,
    mms_initial_state,
    mms_profile,
    mms_projected_source,
    mms_source_coeffs,
    two_stream_init,
)
from .driver import RunConfig, read_snapshot, run, step, write_snapshot
