"""Command-line front end: reproducible runs with on-disk artifacts.

Subcommands: ground, spectrum, continue, evolve (alias verify), plot.
Exit codes: 0 success, 2 usage or parameter error, 3 solver failure,
4 partial result (step underflow, blowup). Every run writes a
run-manifest.json next to its outputs recording the resolved options.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .continuation import ContinuationPoint, continue_path
from .errors import (
    BadParameter,
    CGLWavesError,
    NonConvergence,
    NumericalBlowup,
    StepUnderflow,
)
from .evolve import evolve
from .fieldio import (
    read_field,
    read_path_csv,
    write_field,
    write_json,
    write_path_csv,
    write_spectrum_csv,
    write_trajectory_csv,
)
from .grid import Domain, ProblemParams, RadialField, build_grid
from .ground import solve_ground_state
from .linearized import (
    eigs_l_plus,
    eta_identity_residual,
    kernel_diagnostics,
    pohozaev_identity_residual,
    spectrum_k,
)
from .plotsvg import line_plot_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_PARTIAL = 4


def _default_grid() -> int:
    env = os.environ.get("CGLWAVES_DEFAULT_GRID")
    return int(env) if env else 1000


def _params_from_args(args) -> ProblemParams:
    return ProblemParams(
        domain=Domain.WHOLE_SPACE if args.domain == "whole" else Domain.UNIT_BALL,
        dim=args.dim,
        alpha=args.alpha,
        rho=args.rho,
        theta=args.theta,
    )


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", choices=["whole", "ball"], default="whole")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=None, help="number of radial cells")
    p.add_argument("--rmax", type=float, default=None)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="JSON file of option defaults (flags win)")
    p.add_argument("--json", action="store_true", help="print a JSON summary to stdout")


def _manifest(args, outputs: list[str]) -> None:
    out_dir = Path(outputs[0]).parent if outputs else Path(".")
    payload = {
        "command": args.command,
        "options": {
            k: v for k, v in sorted(vars(args).items()) if k not in ("command", "func")
        },
        "outputs": [str(o) for o in outputs],
        "version": __version__,
    }
    write_json(out_dir / "run-manifest.json", payload)


def _emit(args, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))


def _ground_single(args, rho: float, out: str) -> dict:
    params = ProblemParams(
        domain=Domain.WHOLE_SPACE if args.domain == "whole" else Domain.UNIT_BALL,
        dim=args.dim,
        alpha=args.alpha,
        rho=rho,
        theta=args.theta,
    )
    npoints = args.grid if args.grid else _default_grid()
    grid = build_grid(params, npoints, args.rmax)
    gs = solve_ground_state(params, grid)
    write_field(out, gs.U, params)
    tail = float(gs.values[-1] / gs.values[0])
    summary = {
        "residual": gs.residual_norm,
        "energy": gs.energy,
        "peak": float(gs.values[0]),
        "decay_check": {
            "monotone_decreasing": bool(np.all(np.diff(gs.values) < 0)),
            "tail_over_peak": tail,
        },
        "out": str(out),
        "rho": rho,
    }
    return summary


def cmd_ground(args) -> int:
    if args.sweep_rho:
        rhos = [float(x) for x in args.sweep_rho.split(",")]
        stem = Path(args.out)
        outs = [str(stem.with_name(f"{stem.stem}_rho{i}{stem.suffix}")) for i in range(len(rhos))]
        if args.jobs and args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                futures = [
                    pool.submit(_ground_single, args, rho, out)
                    for rho, out in zip(rhos, outs)
                ]
                summaries = [f.result() for f in futures]
        else:
            summaries = [
                _ground_single(args, rho, out) for rho, out in zip(rhos, outs)
            ]
        _manifest(args, outs)
        _emit(args, {"runs": summaries})
        return EXIT_OK
    summary = _ground_single(args, args.rho, args.out)
    _manifest(args, [args.out])
    _emit(args, summary)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    field, params = read_field(args.infile)
    gs = solve_ground_state(params, field.grid, init=RadialField(field.grid, np.real(field.values)))
    spec = spectrum_k(gs, args.k)
    lp = eigs_l_plus(gs, min(args.k, 6))
    report = kernel_diagnostics(gs)
    payload = {
        "lambda1_K": float(spec.eigenvalues[0]),
        "lambda2_K": float(spec.eigenvalues[1]) if args.k >= 2 else None,
        "lambda_K": [float(x) for x in spec.eigenvalues],
        "lambda_Lplus": [float(x) for x in lp.eigenvalues],
        "kernel_dim": report.kernel_dim_estimate,
        "kernel_alignment": report.kernel_alignment,
        "sigma_min_Lplus": report.sigma_min_lplus,
        "lminus_smallest": report.lminus_smallest[0],
        "second_singular_value": report.second_singular_value,
    }
    if args.check_identities:
        identities = {}
        if params.domain is Domain.WHOLE_SPACE and params.rho == 1.0:
            identities["eta_whole"] = eta_identity_residual(gs)
        if params.domain is Domain.UNIT_BALL:
            identities["eta_ball"] = eta_identity_residual(gs)
            if params.rho == 0.0:
                identities["pohozaev"] = pohozaev_identity_residual(gs)
        payload["identity_residuals"] = identities
    outputs = [args.out]
    write_json(args.out, payload)
    if args.eigs_csv:
        write_spectrum_csv(args.eigs_csv, spec)
        outputs.append(args.eigs_csv)
    if args.dump_vectors:
        stem = Path(args.out)
        for j in range(min(args.dump_vectors, args.k)):
            out_j = stem.with_name(f"{stem.stem}_phi{j + 1}.csv")
            write_field(out_j, spec.field(j), params)
            outputs.append(str(out_j))
    _manifest(args, outputs)
    _emit(args, payload)
    return EXIT_OK


def cmd_continue(args) -> int:
    params = _params_from_args(args)
    npoints = args.grid if args.grid else _default_grid()
    grid = build_grid(params, npoints, args.rmax)
    code = EXIT_OK
    try:
        path = continue_path(
            theta=args.theta,
            beta=args.beta,
            gamma_target=args.gamma_to,
            step0=args.step,
            params=params,
            grid=grid,
        )
    except StepUnderflow as exc:
        path = exc.partial_path
        code = EXIT_PARTIAL
        print(f"warning: {exc}; writing partial path", file=sys.stderr)
    outputs = [args.out]
    write_path_csv(args.out, path)
    if args.dump_fields:
        stem = Path(args.out)
        for i, pt in enumerate(path.points):
            out_i = stem.with_name(f"point_{i:04d}.csv")
            write_field(out_i, pt.u, params)
            outputs.append(str(out_i))
    _manifest(args, outputs)
    _emit(
        args,
        {
            "points": len(path.points),
            "gamma_final": path.points[-1].gamma,
            "omega_final": path.points[-1].omega,
            "max_residual": max(pt.residual for pt in path.points),
            "partial": code == EXIT_PARTIAL,
        },
    )
    return code


def _load_evolve_input(args) -> tuple[RadialField, ProblemParams, float, float, ContinuationPoint | None]:
    if args.point:
        dir_part, _, idx_part = args.point.partition(":")
        idx = int(idx_part)
        pdir = Path(dir_part)
        path_csv = pdir / "path.csv" if pdir.is_dir() else pdir
        cols = read_path_csv(path_csv)
        gamma = float(cols["gamma"][idx])
        omega = float(cols["omega"][idx])
        field_file = path_csv.parent / f"point_{idx:04d}.csv"
        field, params = read_field(field_file)
        ref = ContinuationPoint(gamma, omega, field, float(cols["residual"][idx]))
        return field, params, gamma, omega, ref
    field, params = read_field(args.infile)
    gamma = args.gamma if args.gamma is not None else params.theta
    omega = args.omega
    ref = None
    if not args.defocus:
        ref = ContinuationPoint(gamma, omega, field, 0.0)
    return field, params, gamma, omega, ref


def cmd_evolve(args) -> int:
    if args.point is None and args.infile is None:
        raise BadParameter("need --point or --in for the initial data")
    field, params, gamma, omega, ref = _load_evolve_input(args)
    code = EXIT_OK
    try:
        summary = evolve(
            field,
            args.t_final,
            args.dt,
            gamma,
            params,
            reference=ref,
            defocus=args.defocus,
        )
    except NumericalBlowup as exc:
        summary = exc.summary
        code = EXIT_PARTIAL
        print(f"warning: {exc}; writing partial trajectory", file=sys.stderr)
    outputs = [args.out]
    write_trajectory_csv(args.out, summary)
    if args.final_out:
        write_field(args.final_out, summary.final, params)
        outputs.append(args.final_out)
    norms = summary.norms
    payload = {
        "t_final": float(summary.times[-1]),
        "max_drift": float(np.max(summary.drifts)) if summary.drifts is not None else None,
        "monotone_decay": bool(np.all(np.diff(norms) <= 1e-12 * norms[0])),
        "blowup_time": summary.blowup_time,
    }
    _manifest(args, outputs)
    _emit(args, payload)
    return code


def cmd_plot(args) -> int:
    src = Path(args.infile)
    text = src.read_text(encoding="utf-8")
    first = text.splitlines()[0] if text.strip() else ""
    if first.startswith("# domain="):
        field, _ = read_field(src)
        svg = line_plot_svg(
            [
                (field.grid.r, np.real(field.values), "real"),
                (field.grid.r, np.imag(field.values), "imag"),
            ],
            title=src.name,
            xlabel="r",
            ylabel="u(r)",
        )
    elif first.startswith("gamma,"):
        cols = read_path_csv(src)
        kind = args.kind if args.kind != "auto" else "omega"
        svg = line_plot_svg(
            [(cols["gamma"], cols[kind], kind)],
            title=src.name,
            xlabel="gamma",
            ylabel=kind,
        )
    elif first.startswith("t,"):
        cols = read_path_csv(src)
        kind = args.kind if args.kind != "auto" else "l2norm"
        svg = line_plot_svg(
            [(cols["t"], cols[kind], kind)], title=src.name, xlabel="t", ylabel=kind
        )
    else:
        raise BadParameter(f"unrecognized input file {src}")
    Path(args.out).write_text(svg, encoding="utf-8")
    _manifest(args, [args.out])
    _emit(args, {"out": args.out})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cglwaves",
        description="Standing waves of the dissipative wave equation: ground states, "
        "spectra, continuation, and time evolution on radial grids.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground", help="compute the positive radial ground state")
    _add_problem_flags(p)
    _add_common_flags(p)
    p.add_argument("--out", default="U.csv")
    p.add_argument("--sweep-rho", default=None, help="comma-separated rho values")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("spectrum", help="spectra and kernel diagnostics of the linearization")
    _add_common_flags(p)
    p.add_argument("--in", dest="infile", required=True, help="ground-state field file")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--out", default="spec.json")
    p.add_argument("--eigs-csv", default=None)
    p.add_argument("--dump-vectors", type=int, default=0)
    p.add_argument("--check-identities", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("continue", help="trace the standing-wave branch in gamma")
    _add_problem_flags(p)
    _add_common_flags(p)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma-to", type=float, required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--out", default="path.csv")
    p.add_argument("--dump-fields", action="store_true")
    p.set_defaults(func=cmd_continue)

    for name in ("evolve", "verify"):
        p = sub.add_parser(name, help="integrate in time, checking drift or decay")
        _add_common_flags(p)
        p.add_argument("--point", default=None, help="PATHDIR:INDEX branch point")
        p.add_argument("--in", dest="infile", default=None, help="initial field file")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--omega", type=float, default=0.0)
        p.add_argument("--t-final", type=float, default=1.0)
        p.add_argument("--dt", type=float, required=True)
        p.add_argument("--defocus", action="store_true")
        p.add_argument("--out", default="traj.csv")
        p.add_argument("--final-out", default=None)
        p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("plot", help="render a CSV or field file to SVG")
    _add_common_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument(
        "--kind",
        choices=["auto", "omega", "residual", "l2norm", "drift", "peak"],
        default="auto",
    )
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # pre-scan for --config so file-provided defaults can be installed
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        try:
            config = json.loads(Path(cfg_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {cfg_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for action in parser._subparsers._group_actions:
            for sp in getattr(action, "choices", {}).values():
                sp.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.command == "plot" and args.out is None:
        args.out = str(Path(args.infile).with_suffix(".svg"))
    try:
        return args.func(args)
    except (BadParameter, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergence, CGLWavesError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
