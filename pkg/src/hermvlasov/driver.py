"""Time loop, configuration handling and file outputs.

One step: solve the implicit-midpoint system with the Newton-Krylov solver,
then (with adaptivity on) propose new Hermite parameters per species, gate
them against the tolerances, and project the solution onto the updated basis
at the fixed time t^{j+1}.  Diagnostics are evaluated after the projection.

Outputs per run: diagnostics.csv (one row per step), field.csv (field
coefficients per step), coefficient snapshots at a fixed cadence, a plain-text
manifest with the resolved configuration and every adaptation event, and for
manufactured runs mms_error.csv with the exact-solution error trace.
"""

from __future__ import annotations

import math
import platform
import time as _time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .adapt import gate_update, propose_params
from .core import GridConfig, HermiteBasisParams, SpectralState, validate_state
from .diagnostics import DiagnosticsRecord, compute_record, l2_error
from .residual import (
    NeutralityError,
    make_context,
    pack,
    packed_residual_fn,
    poisson_field,
    unpack,
)
from .scenarios import (
    MmsProfile,
    mms_exact_f,
    mms_initial_state,
    mms_profile,
    mms_projected_source,
    two_stream_init,
)
from .solver import NewtonStats, SolverConfig, newton_solve
from .transform import apply_transform, build_transform


class StepError(RuntimeError):
    """Newton failed to converge; run() dumps the last good state on abort."""


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig
    solver: SolverConfig = SolverConfig()
    scenario: str = "two_stream"
    scenario_params: dict = field(default_factory=dict)
    adaptive: bool = True
    outdir: str | None = None
    snapshot_every: int = 200
    extrema_window: tuple[float, float] = (-3.0, 3.0)
    extrema_points: int = 400
    extrema_x_points: int = 256

    def __post_init__(self):
        if self.snapshot_every < 1:
            raise ValueError("snapshot cadence must be >= 1")
        if self.scenario not in ("two_stream", "mms"):
            raise ValueError(f"unknown scenario {self.scenario!r}")


@dataclass
class StepStats:
    newton: NewtonStats
    adapt_events: list[tuple[float, int, HermiteBasisParams, HermiteBasisParams]]


@dataclass
class RunResult:
    records: list[DiagnosticsRecord]
    state: SpectralState
    wall_time: float
    adapt_events: list[tuple[float, int, HermiteBasisParams, HermiteBasisParams]]
    mms_errors: list[tuple[float, float]]
    outdir: Path | None


def initial_state(cfg: RunConfig) -> SpectralState:
    if cfg.scenario == "two_stream":
        return two_stream_init(cfg.grid, **cfg.scenario_params)
    profile = _profile_of(cfg)
    return mms_initial_state(profile, cfg.grid)


def _profile_of(cfg: RunConfig) -> MmsProfile:
    params = cfg.scenario_params
    if "profile" in params:
        return params["profile"]
    return mms_profile(str(params.get("case", "1")))


def _source_hook(cfg: RunConfig, state: SpectralState):
    """Manufactured source, projected onto the (frozen) basis of this step."""
    profile = _profile_of(cfg)
    basis = state.basis[0]
    Nv, Nx = cfg.grid.Nv, cfg.grid.Nx

    def source(t: float) -> np.ndarray:
        return mms_projected_source(profile, t, basis, Nv, Nx)[None, :, :]

    return source


def step(
    state: SpectralState,
    cfg: RunConfig,
    ref_record: DiagnosticsRecord | None = None,
) -> tuple[SpectralState, DiagnosticsRecord, StepStats]:
    """Advance one time step, adapt the bases, and evaluate diagnostics."""
    mms = cfg.scenario == "mms"
    source = _source_hook(cfg, state) if mms else None
    ctx = make_context(state, cfg.grid, source=source, mms_mode=mms)
    x0 = pack(ctx.prev)
    x, converged, stats = newton_solve(packed_residual_fn(ctx), x0, cfg.solver)
    if not converged:
        raise StepError(
            f"Newton did not converge at t={state.time:.6g} "
            f"(residual {stats.residual_norms[-1]:.3e} after {stats.newton_iters} iterations)"
        )
    coeffs = unpack(x, ctx.n_species, cfg.grid.Nv, cfg.grid.Nx)

    new = state.copy()
    new.coeffs = [coeffs[s] for s in range(ctx.n_species)]
    new.time = state.time + ctx.dt
    if mms:
        new.efield = np.zeros(cfg.grid.Nx + 1, dtype=complex)
    else:
        new.efield = poisson_field(
            coeffs, ctx.charges, ctx.alphas, cfg.grid.L
        )

    events: list[tuple[float, int, HermiteBasisParams, HermiteBasisParams]] = []
    if cfg.adaptive:
        for s in range(new.n_species):
            old = new.basis[s]
            proposal = propose_params(new, s)
            gated = gate_update(old, proposal.new_params, cfg.grid)
            if gated.update_u or gated.update_alpha:
                P = build_transform(old, gated.new_params, cfg.grid.Nv)
                new = apply_transform(P, new, s)
                events.append((new.time, s, old, gated.new_params))

    record = compute_record(
        new,
        reference=ref_record,
        extrema_species=_extrema_species(new),
        window=cfg.extrema_window,
        n_v=cfg.extrema_points,
        n_x=cfg.extrema_x_points,
    )
    return new, record, StepStats(newton=stats, adapt_events=events)


def _extrema_species(state: SpectralState) -> list[int]:
    """Electron species (negative charge) when present, else all species."""
    negative = [s for s in range(state.n_species) if state.charges[s] < 0.0]
    return negative or list(range(state.n_species))


def run(cfg: RunConfig) -> RunResult:
    """Run the full time loop and write all output files."""
    t_start = _time.perf_counter()
    outdir = Path(cfg.outdir) if cfg.outdir is not None else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)

    state = initial_state(cfg)
    validate_state(state)
    mms = cfg.scenario == "mms"
    profile = _profile_of(cfg) if mms else None

    ref = compute_record(
        state,
        extrema_species=_extrema_species(state),
        window=cfg.extrema_window,
        n_v=cfg.extrema_points,
        n_x=cfg.extrema_x_points,
    )
    records = [ref]
    field_trace: list[tuple[float, np.ndarray]] = [(state.time, state.efield.copy())]
    all_events: list = []
    mms_errors: list[tuple[float, float]] = []
    if mms:
        mms_errors.append((0.0, l2_error(state, 0, mms_exact_f(profile, 0.0))))

    n_steps = int(round(cfg.grid.t_final / cfg.grid.dt))
    if outdir is not None:
        write_snapshot(outdir / "snapshot_000000.txt", state)

    for j in range(1, n_steps + 1):
        try:
            state, record, stats = step(state, cfg, ref_record=ref)
        except StepError:
            if outdir is not None:
                write_snapshot(outdir / "snapshot_abort.txt", state)
            raise
        records.append(record)
        field_trace.append((state.time, state.efield.copy()))
        all_events.extend(stats.adapt_events)
        if mms:
            mms_errors.append(
                (state.time, l2_error(state, 0, mms_exact_f(profile, state.time)))
            )
        if outdir is not None and (j % cfg.snapshot_every == 0 or j == n_steps):
            write_snapshot(outdir / f"snapshot_{j:06d}.txt", state)

    wall = _time.perf_counter() - t_start
    if outdir is not None:
        write_diagnostics_csv(outdir / "diagnostics.csv", records)
        write_field_csv(outdir / "field.csv", field_trace)
        write_manifest(outdir / "manifest.txt", cfg, wall, n_steps, all_events)
        if mms:
            write_mms_errors(outdir / "mms_error.csv", mms_errors)
    return RunResult(
        records=records,
        state=state,
        wall_time=wall,
        adapt_events=all_events,
        mms_errors=mms_errors,
        outdir=outdir,
    )


FMT = "{:.17g}"


def _fmt(x: float) -> str:
    return FMT.format(float(x))


def write_diagnostics_csv(path: Path, records: Sequence[DiagnosticsRecord]) -> None:
    ns = len(records[0].mass)
    cols = ["t"]
    for s in range(ns):
        cols += [f"mass_{s}", f"mom_{s}", f"Ekin_{s}", f"alpha_{s}", f"u_{s}"]
    cols += ["Epot", "mass_err", "mom_err", "energy_err", "fmin", "fmax", "E_l2"]
    lines = [",".join(cols)]
    for r in records:
        vals = [r.t]
        for s in range(ns):
            vals += [r.mass[s], r.momentum[s], r.kinetic[s], r.alpha[s], r.u[s]]
        vals += [r.potential, r.mass_err, r.momentum_err, r.energy_err,
                 r.f_min, r.f_max, r.e_l2]
        lines.append(",".join(_fmt(v) for v in vals))
    path.write_text("\n".join(lines) + "\n")


def write_field_csv(path: Path, field_trace: Sequence[tuple[float, np.ndarray]]) -> None:
    lines = ["t,k,re,im"]
    for t, efield in field_trace:
        for k, ek in enumerate(efield):
            lines.append(f"{_fmt(t)},{k},{_fmt(ek.real)},{_fmt(ek.imag)}")
    path.write_text("\n".join(lines) + "\n")


def write_manifest(path: Path, cfg: RunConfig, wall: float, n_steps: int, events) -> None:
    lines = [
        f"package_version = {__version__}",
        f"python = {platform.python_version()}",
        f"numpy = {np.__version__}",
        f"scenario = {cfg.scenario}",
        f"adaptive = {cfg.adaptive}",
        f"L = {_fmt(cfg.grid.L)}",
        f"Nv = {cfg.grid.Nv}",
        f"Nx = {cfg.grid.Nx}",
        f"dt = {_fmt(cfg.grid.dt)}",
        f"t_final = {_fmt(cfg.grid.t_final)}",
        f"nu = {_fmt(cfg.grid.nu)}",
        f"u_tol = {_fmt(cfg.grid.u_tol)}",
        f"alpha_tol = {_fmt(cfg.grid.alpha_tol)}",
        f"abs_tol = {_fmt(cfg.solver.abs_tol)}",
        f"rel_tol = {_fmt(cfg.solver.rel_tol)}",
        f"max_newton = {cfg.solver.max_newton}",
        f"max_gmres = {cfg.solver.max_gmres}",
        f"eta_max = {_fmt(cfg.solver.eta_max)}",
        f"gmres_restart = {cfg.solver.gmres_restart}",
        f"snapshot_every = {cfg.snapshot_every}",
        f"n_steps = {n_steps}",
        f"wall_time_s = {wall:.3f}",
    ]
    for key, val in sorted(cfg.scenario_params.items()):
        if key != "profile":
            lines.append(f"scenario_{key} = {val}")
    for t, s, old, new in events:
        lines.append(
            f"adapt_event = t={_fmt(t)} species={s} "
            f"alpha={_fmt(old.alpha)}->{_fmt(new.alpha)} u={_fmt(old.u)}->{_fmt(new.u)}"
        )
    path.write_text("\n".join(lines) + "\n")


def write_mms_errors(path: Path, errors: Sequence[tuple[float, float]]) -> None:
    lines = ["t,l2_error"] + [f"{_fmt(t)},{_fmt(e)}" for t, e in errors]
    path.write_text("\n".join(lines) + "\n")


def write_snapshot(path: Path, state: SpectralState) -> None:
    """Plain-text snapshot: header, then one `species,n,k,re,im` row per entry."""
    lines = [
        f"# nv {state.Nv}",
        f"# nx {state.Nx}",
        f"# n_species {state.n_species}",
        f"# L {_fmt(state.L)}",
        f"# time {_fmt(state.time)}",
    ]
    for s in range(state.n_species):
        b = state.basis[s]
        lines.append(
            f"# species {s} q {_fmt(state.charges[s])} m {_fmt(state.masses[s])} "
            f"alpha {_fmt(b.alpha)} u {_fmt(b.u)}"
        )
    lines.append("species,n,k,re,im")
    for s in range(state.n_species):
        C = state.coeffs[s]
        for n in range(state.Nv + 1):
            for k in range(state.Nx + 1):
                lines.append(
                    f"{s},{n},{k},{_fmt(C[n, k].real)},{_fmt(C[n, k].imag)}"
                )
    path.write_text("\n".join(lines) + "\n")


def read_snapshot(path) -> SpectralState:
    """Inverse of write_snapshot."""
    header: dict[str, str] = {}
    species_meta: dict[int, tuple[float, float, float, float]] = {}
    rows: list[tuple[int, int, int, float, float]] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[0] == "species":
                s = int(parts[1])
                vals = {parts[i]: float(parts[i + 1]) for i in range(2, len(parts), 2)}
                species_meta[s] = (vals["q"], vals["m"], vals["alpha"], vals["u"])
            else:
                header[parts[0]] = parts[1]
            continue
        if line.startswith("species,"):
            continue
        s, n, k, re, im = line.split(",")
        rows.append((int(s), int(n), int(k), float(re), float(im)))

    Nv, Nx = int(header["nv"]), int(header["nx"])
    ns = int(header["n_species"])
    coeffs = [np.zeros((Nv + 1, Nx + 1), dtype=complex) for _ in range(ns)]
    for s, n, k, re, im in rows:
        coeffs[s][n, k] = re + 1j * im
    basis = [
        HermiteBasisParams(alpha=species_meta[s][2], u=species_meta[s][3])
        for s in range(ns)
    ]
    charges = tuple(species_meta[s][0] for s in range(ns))
    masses = tuple(species_meta[s][1] for s in range(ns))
    alphas = [b.alpha for b in basis]
    try:
        efield = poisson_field(np.stack(coeffs), charges, alphas, float(header["L"]))
    except NeutralityError:
        # manufactured-solution snapshots hold a single non-neutral species
        # whose field is identically zero by construction
        efield = np.zeros(Nx + 1, dtype=complex)
    return SpectralState(
        coeffs=coeffs,
        basis=basis,
        efield=efield,
        time=float(header["time"]),
        L=float(header["L"]),
        charges=charges,
        masses=masses,
    )


def parse_config(path, overrides: dict[str, str] | None = None) -> RunConfig:
    """Flat key-value config file (`key = value`, `#` comments).

    overrides maps keys to replacement values (the CLI's --set flags).
    """
    raw: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        raw[key.strip()] = value.strip()
    if overrides:
        raw.update(overrides)

    def pop_float(key, default):
        return float(raw.pop(key)) if key in raw else default

    def pop_int(key, default):
        return int(raw.pop(key)) if key in raw else default

    def pop_bool(key, default):
        if key not in raw:
            return default
        return raw.pop(key).lower() in ("1", "true", "yes", "on")

    scenario = raw.pop("scenario", "two_stream")
    grid = GridConfig(
        L=pop_float("L", 2.0 * math.pi),
        Nv=pop_int("nv", 50),
        Nx=pop_int("nx", 16),
        dt=pop_float("dt", 0.05),
        t_final=pop_float("t_final", 10.0),
        nu=pop_float("nu", 0.0),
        u_tol=pop_float("u_tol", 1e-2),
        alpha_tol=pop_float("alpha_tol", 1e-1),
    )
    solver = SolverConfig(
        max_newton=pop_int("max_newton", 500),
        max_gmres=pop_int("max_gmres", 1000),
        eta_max=pop_float("eta_max", 0.9),
        abs_tol=pop_float("abs_tol", 1e-9),
        rel_tol=pop_float("rel_tol", 1e-9),
        fd_epsilon_scale=pop_float("fd_epsilon_scale", 1.0),
        gmres_restart=pop_int("gmres_restart", 100),
    )
    adaptive = pop_bool("adaptive", True)
    outdir = raw.pop("outdir", None)
    snapshot_every = pop_int("snapshot_every", 200)

    params: dict = {}
    if scenario == "mms":
        params["case"] = raw.pop("case", "1")
    else:
        if "eps" in raw:
            params["eps"] = float(raw.pop("eps"))
        if "mass_ratio" in raw:
            params["mass_ratio"] = float(raw.pop("mass_ratio"))
    if raw:
        raise ValueError(f"unrecognized config keys: {sorted(raw)}")
    return RunConfig(
        grid=grid,
        solver=solver,
        scenario=scenario,
        scenario_params=params,
        adaptive=adaptive,
        outdir=outdir,
        snapshot_every=snapshot_every,
    )
