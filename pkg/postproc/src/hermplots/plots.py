"""Figure generation from solver output files.

Plot kinds
  phase-space    heatmap of the reconstructed electron distribution from a
                 snapshot on [0, L] x [v_min, v_max]
  conservation   relative mass/momentum/energy error traces from diagnostics.csv
  params         per-species alpha(t) and u(t) evolution from diagnostics.csv
  extrema        f_min / f_max traces from diagnostics.csv
  field-map      |E(t, x)| spacetime map rebuilt from field.csv
  convergence    log-log error-vs-dt plot with fitted slope from convergence.csv
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import (
    SchemaError,
    n_species_of,
    read_diagnostics,
    read_csv_columns,
    read_field,
    read_snapshot,
)
from .reconstruct import evaluate, fit_loglog_slope

PLOT_KINDS = (
    "phase-space",
    "conservation",
    "params",
    "extrema",
    "field-map",
    "convergence",
)


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple[str, ...]
    output: str
    window: tuple[float, float] = (-3.0, 3.0)
    grid_points: tuple[int, int] = (256, 400)  # (x, v)
    species: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("plot job needs at least one input file")


def plot(job: PlotJob) -> Path:
    """Render the job; returns the written image path."""
    for p in job.inputs:
        if not Path(p).exists():
            raise FileNotFoundError(p)
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig = _RENDERERS[job.kind](job)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _phase_space(job: PlotJob):
    snap = read_snapshot(job.inputs[0])
    nx, nv = job.grid_points
    x = np.linspace(0.0, snap.L, nx, endpoint=False)
    v = np.linspace(job.window[0], job.window[1], nv)
    f = evaluate(snap, x, v, species=job.species)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.pcolormesh(x, v, f.T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="f(x, v)")
    ax.set_xlabel("x")
    ax.set_ylabel("v")
    ax.set_title(f"distribution at t = {snap.time:g}")
    return fig


def _conservation(job: PlotJob):
    diag = read_diagnostics(job.inputs[0])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    floor = 1e-18  # zeros (exact conservation) would vanish on a log axis
    for key, label in (
        ("mass_err", "mass"),
        ("mom_err", "momentum"),
        ("energy_err", "total energy"),
    ):
        ax.semilogy(diag["t"], np.maximum(np.abs(diag[key]), floor), label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("relative error")
    ax.legend()
    ax.set_title("conservation errors")
    return fig


def _params(job: PlotJob):
    diag = read_diagnostics(job.inputs[0])
    ns = n_species_of(diag)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for s in range(ns):
        ax1.plot(diag["t"], diag[f"alpha_{s}"], label=f"species {s}")
        ax2.plot(diag["t"], diag[f"u_{s}"], label=f"species {s}")
    ax1.set_xlabel("t")
    ax1.set_ylabel("alpha")
    ax2.set_xlabel("t")
    ax2.set_ylabel("u")
    ax1.legend()
    fig.suptitle("Hermite parameter evolution")
    return fig


def _extrema(job: PlotJob):
    diag = read_diagnostics(job.inputs[0])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(diag["t"], diag["fmax"], label="f_max")
    ax.plot(diag["t"], diag["fmin"], label="f_min")
    ax.set_xlabel("t")
    ax.set_ylabel("distribution extrema")
    ax.legend()
    return fig


def _field_map(job: PlotJob):
    times, ks, coeffs = read_field(job.inputs[0])
    # rebuild E(t, x) with conjugate symmetry on the phase grid 2 pi x / L
    nx = 256
    theta = np.linspace(0.0, 2.0 * np.pi, nx, endpoint=False)
    phases = np.exp(1j * np.outer(theta, ks[1:]))  # (nx, nk-1)
    E = coeffs[:, 0].real[None, :] + 2.0 * (phases @ coeffs[:, 1:].T).real
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.pcolormesh(times, theta, E, shading="auto", cmap="RdBu_r")
    fig.colorbar(mesh, ax=ax, label="E(t, x)")
    ax.set_xlabel("t")
    ax.set_ylabel("2 pi x / L")
    return fig


def _convergence(job: PlotJob):
    cols = read_csv_columns(job.inputs[0])
    if "dt" not in cols or "l2_error" not in cols:
        raise SchemaError(f"{job.inputs[0]}: expected dt,l2_error columns")
    slope = fit_loglog_slope(cols["dt"], cols["l2_error"])
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(cols["dt"], cols["l2_error"], "o-", label=f"measured (slope {slope:.2f})")
    ref = cols["l2_error"][-1] * (cols["dt"] / cols["dt"][-1]) ** 2
    ax.loglog(cols["dt"], ref, "k--", label="slope 2 reference")
    ax.set_xlabel("dt")
    ax.set_ylabel("L2 error")
    ax.legend()
    return fig


_RENDERERS = {
    "phase-space": _phase_space,
    "conservation": _conservation,
    "params": _params,
    "extrema": _extrema,
    "field-map": _field_map,
    "convergence": _convergence,
}
