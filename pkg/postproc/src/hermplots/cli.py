"""Command line interface: `hermplots <kind> --input ... --out figure.png`."""

from __future__ import annotations

import argparse
import sys

from .plots import PLOT_KINDS, PlotJob, plot


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hermplots", description="Plot hermvlasov solver output files"
    )
    parser.add_argument("kind", choices=PLOT_KINDS)
    parser.add_argument("--input", "-i", action="append", required=True,
                        help="input file (repeatable)")
    parser.add_argument("--out", "-o", required=True, help="output image path")
    parser.add_argument("--vmin", type=float, default=-3.0)
    parser.add_argument("--vmax", type=float, default=3.0)
    parser.add_argument("--nx", type=int, default=256)
    parser.add_argument("--nv", type=int, default=400)
    parser.add_argument("--species", type=int, action="append", default=None,
                        help="species index to include (repeatable; default electrons)")
    args = parser.parse_args(argv)

    job = PlotJob(
        kind=args.kind,
        inputs=tuple(args.input),
        output=args.out,
        window=(args.vmin, args.vmax),
        grid_points=(args.nx, args.nv),
        species=tuple(args.species) if args.species else None,
    )
    out = plot(job)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
