"""Readers for the solver's output files.

File schemas (produced by the hermvlasov CLI):

diagnostics.csv   header row, then one row per step; columns
                  t, per species (mass_s, mom_s, Ekin_s, alpha_s, u_s),
                  Epot, mass_err, mom_err, energy_err, fmin, fmax, E_l2
field.csv         t,k,re,im rows of field coefficients per step
convergence.csv   dt,l2_error rows from the convergence driver
mms_error.csv     t,l2_error rows from manufactured runs
snapshot_*.txt    commented header (nv, nx, n_species, L, time, per-species
                  q/m/alpha/u), then `species,n,k,re,im` rows
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """An input file does not match its documented layout."""


def read_csv_columns(path) -> dict[str, np.ndarray]:
    """Generic reader for the header+rows CSV files, columns by name."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    names = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(names):
            raise SchemaError(f"{path}: row with {len(parts)} fields, expected {len(names)}")
        rows.append([float(p) for p in parts])
    data = np.array(rows) if rows else np.empty((0, len(names)))
    return {name: data[:, i] for i, name in enumerate(names)}


def read_diagnostics(path) -> dict[str, np.ndarray]:
    cols = read_csv_columns(path)
    for required in ("t", "Epot", "mass_err", "mom_err", "energy_err",
                     "fmin", "fmax", "E_l2"):
        if required not in cols:
            raise SchemaError(f"{path}: missing column {required!r}")
    return cols


def n_species_of(diag: dict[str, np.ndarray]) -> int:
    return sum(
        1 for name in diag if name.startswith("mass_") and name[5:].isdigit()
    )


def read_field(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """field.csv -> (times, wavenumbers, complex field matrix (nt, nk))."""
    cols = read_csv_columns(path)
    for required in ("t", "k", "re", "im"):
        if required not in cols:
            raise SchemaError(f"{path}: missing column {required!r}")
    times = np.unique(cols["t"])
    ks = np.unique(cols["k"]).astype(int)
    field = np.zeros((len(times), len(ks)), dtype=complex)
    t_index = {t: i for i, t in enumerate(times)}
    for t, k, re, im in zip(cols["t"], cols["k"], cols["re"], cols["im"]):
        field[t_index[t], int(k)] = re + 1j * im
    return times, ks, field


@dataclass
class Snapshot:
    Nv: int
    Nx: int
    L: float
    time: float
    charge: tuple[float, ...]
    mass: tuple[float, ...]
    alpha: tuple[float, ...]
    shift: tuple[float, ...]
    coeffs: list[np.ndarray]  # complex (Nv+1, Nx+1) per species

    @property
    def n_species(self) -> int:
        return len(self.coeffs)

    def electron_species(self) -> list[int]:
        return [s for s in range(self.n_species) if self.charge[s] < 0.0] or list(
            range(self.n_species)
        )


def read_snapshot(path) -> Snapshot:
    header: dict[str, str] = {}
    species_meta: dict[int, dict[str, float]] = {}
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[0] == "species":
                s = int(parts[1])
                species_meta[s] = {
                    parts[i]: float(parts[i + 1]) for i in range(2, len(parts), 2)
                }
            else:
                header[parts[0]] = parts[1]
        elif not line.startswith("species,"):
            parts = line.split(",")
            if len(parts) != 5:
                raise SchemaError(f"{path}: malformed data row {line!r}")
            rows.append(parts)
    try:
        Nv, Nx = int(header["nv"]), int(header["nx"])
        ns = int(header["n_species"])
        L, time = float(header["L"]), float(header["time"])
    except KeyError as missing:
        raise SchemaError(f"{path}: missing header field {missing}") from None
    if set(species_meta) != set(range(ns)):
        raise SchemaError(f"{path}: species metadata incomplete")
    coeffs = [np.zeros((Nv + 1, Nx + 1), dtype=complex) for _ in range(ns)]
    for s, n, k, re, im in rows:
        coeffs[int(s)][int(n), int(k)] = float(re) + 1j * float(im)
    return Snapshot(
        Nv=Nv,
        Nx=Nx,
        L=L,
        time=time,
        charge=tuple(species_meta[s]["q"] for s in range(ns)),
        mass=tuple(species_meta[s]["m"] for s in range(ns)),
        alpha=tuple(species_meta[s]["alpha"] for s in range(ns)),
        shift=tuple(species_meta[s]["u"] for s in range(ns)),
        coeffs=coeffs,
    )
