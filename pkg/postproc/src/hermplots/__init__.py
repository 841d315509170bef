"""Offline plotting for hermvlasov solver outputs."""

__version__ = "0.1.0"

from .io import Snapshot, read_diagnostics, read_field, read_snapshot
from .plots import PlotJob, plot
from .reconstruct import evaluate, evaluate_species, fit_loglog_slope
