"""Command-line driver: scenario runs, manufactured-solution studies, demos."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .core import GridConfig
from .driver import RunConfig, parse_config, run
from .scenarios import expansion_demo
from .solver import SolverConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hermvlasov",
        description="Adaptive Hermite-Fourier spectral Vlasov-Poisson solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run from a key-value config file")
    p_run.add_argument("config")
    p_run.add_argument("--outdir", default=None, help="override output directory")
    p_run.add_argument(
        "--set", dest="overrides", action="append", default=[],
        metavar="KEY=VALUE", help="override a config key (repeatable)",
    )

    p_mms = sub.add_parser("mms", help="manufactured-solution run")
    p_mms.add_argument("--case", choices=["1", "2", "3", "tol"], default="1")
    p_mms.add_argument("--nv", type=int, default=16)
    p_mms.add_argument("--nx", type=int, default=4)
    p_mms.add_argument("--dt", type=float, default=1e-2)
    p_mms.add_argument("--t-final", type=float, default=None)
    p_mms.add_argument("--alpha-tol", type=float, default=1e-2)
    p_mms.add_argument("--u-tol", type=float, default=1e-2)
    mode = p_mms.add_mutually_exclusive_group()
    mode.add_argument("--adaptive", action="store_true", default=None)
    mode.add_argument("--fixed", dest="adaptive", action="store_false")
    p_mms.add_argument("--outdir", default=None)

    p_ts = sub.add_parser("two-stream", help="two-stream instability benchmark")
    ts_mode = p_ts.add_mutually_exclusive_group()
    ts_mode.add_argument("--adaptive", action="store_true", default=True)
    ts_mode.add_argument("--fixed", dest="adaptive", action="store_false")
    p_ts.add_argument("--nv", type=int, default=250)
    p_ts.add_argument("--nx", type=int, default=50)
    p_ts.add_argument("--nu", type=float, default=5.0)
    p_ts.add_argument("--dt", type=float, default=0.05)
    p_ts.add_argument("--t-final", type=float, default=100.0)
    p_ts.add_argument("--eps", type=float, default=1e-3)
    p_ts.add_argument("--outdir", default=None)

    p_exp = sub.add_parser("expansion-demo", help="fixed-basis expansion error demo")
    p_exp.add_argument("--u0", type=float, required=True)
    p_exp.add_argument("--alpha0", type=float, default=1.0)
    p_exp.add_argument("--modes", type=int, default=30)

    p_conv = sub.add_parser("convergence", help="error-vs-dt sweep of an mms case")
    p_conv.add_argument("--dt-list", default="1e-1,1e-2,1e-3")
    p_conv.add_argument("--case", choices=["1", "2", "3"], default="1")
    p_conv.add_argument("--nv", type=int, default=16)
    p_conv.add_argument("--nx", type=int, default=4)
    p_conv.add_argument("--t-final", type=float, default=1.0)
    p_conv.add_argument("--adaptive", action="store_true", default=False)
    p_conv.add_argument("--outdir", default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        overrides = {}
        for item in args.overrides:
            key, sep, value = item.partition("=")
            if not sep:
                parser.error(f"--set expects KEY=VALUE, got {item!r}")
            overrides[key.strip()] = value.strip()
        if args.outdir is not None:
            overrides["outdir"] = args.outdir
        cfg = parse_config(args.config, overrides=overrides)
        result = run(cfg)
        print(f"done: {len(result.records) - 1} steps in {result.wall_time:.2f}s")
        return 0

    if args.command == "mms":
        adaptive = args.adaptive if args.adaptive is not None else args.case in ("3", "tol")
        t_final = args.t_final if args.t_final is not None else (10.0 if args.case == "tol" else 1.0)
        grid = GridConfig(
            L=2.0 * math.pi,
            Nv=args.nv,
            Nx=args.nx,
            dt=args.dt,
            t_final=t_final,
            nu=0.0,
            u_tol=args.u_tol,
            alpha_tol=args.alpha_tol,
        )
        cfg = RunConfig(
            grid=grid,
            scenario="mms",
            scenario_params={"case": args.case},
            adaptive=adaptive,
            outdir=args.outdir,
        )
        result = run(cfg)
        final_t, final_err = result.mms_errors[-1]
        print(f"case {args.case}: L2 error {final_err:.6e} at t={final_t:g} "
              f"({result.wall_time:.2f}s)")
        return 0

    if args.command == "two-stream":
        grid = GridConfig(
            L=2.0 * math.pi,
            Nv=args.nv,
            Nx=args.nx,
            dt=args.dt,
            t_final=args.t_final,
            nu=args.nu,
            u_tol=1e-2,
            alpha_tol=1e-1,
        )
        cfg = RunConfig(
            grid=grid,
            scenario="two_stream",
            scenario_params={"eps": args.eps},
            adaptive=args.adaptive,
            outdir=args.outdir,
        )
        result = run(cfg)
        last = result.records[-1]
        print(
            f"two-stream t={last.t:g}: fmin={last.f_min:.4f} fmax={last.f_max:.4f} "
            f"mom_err={last.momentum_err:.3e} energy_err={last.energy_err:.3e} "
            f"({result.wall_time:.2f}s)"
        )
        return 0

    if args.command == "expansion-demo":
        err = expansion_demo(args.u0, alpha0=args.alpha0, n_modes=args.modes)
        print(f"u0={args.u0:g}: relative L2 error {err:.6e}")
        return 0

    if args.command == "convergence":
        dts = [float(s) for s in args.dt_list.split(",") if s]
        errors = []
        for dt in dts:
            grid = GridConfig(
                L=2.0 * math.pi,
                Nv=args.nv,
                Nx=args.nx,
                dt=dt,
                t_final=args.t_final,
                nu=0.0,
                u_tol=1e-2,
                alpha_tol=1e-2,
            )
            cfg = RunConfig(
                grid=grid,
                scenario="mms",
                scenario_params={"case": args.case},
                adaptive=args.adaptive,
                outdir=None,
            )
            result = run(cfg)
            errors.append(result.mms_errors[-1][1])
            print(f"dt={dt:<8g} error={errors[-1]:.6e}")
        slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
        print(f"fitted slope: {slope:.3f}")
        if args.outdir is not None:
            from pathlib import Path

            out = Path(args.outdir)
            out.mkdir(parents=True, exist_ok=True)
            lines = ["dt,l2_error"] + [
                f"{dt:.17g},{e:.17g}" for dt, e in zip(dts, errors)
            ]
            (out / "convergence.csv").write_text("\n".join(lines) + "\n")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
