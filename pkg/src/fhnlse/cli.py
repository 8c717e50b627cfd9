"""Command-line interface.

Subcommands::

    fhnlse groundstate      solve the constrained minimization, write summary
    fhnlse evolve           run the splitting integrator from a chosen state
    fhnlse stability        perturb the minimizer and track the orbit distance
    fhnlse rearrange-test   exercise the rearrangement inequalities on noise
    fhnlse verify           run the built-in verification checks

Exit codes: 0 success, 1 a verification/inequality check failed, 2 invalid
input, 3 the solver did not converge, 4 the computation produced non-finite
values.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    grid_from,
    kernel_from,
    load_config,
    params_from,
    solve_options_from,
)
from .dynamics import conservation_report, evolve
from .errors import NonConvergenceError, NumericalAbort
from .fields import gaussian, plane_wave, random_band_limited
from .groundstate import minimize, require_converged
from .rearrange import riesz_check, symmetric_rearrange
from .snapshots import read_field, write_csv, write_field, write_json
from .spectral import sobolev_seminorm_sq
from .stability import stability_run
from .verify import run_checks

__all__ = ["main", "build_parser"]

_REARRANGE_SLACK = 1e-9


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _resolve(args) -> tuple[dict, Path]:
    cfg = load_config(args.config, overrides=args.set or [])
    if args.output_dir:
        cfg["output"]["directory"] = args.output_dir
    outdir = Path(cfg["output"]["directory"])
    outdir.mkdir(parents=True, exist_ok=True)
    return cfg, outdir


def _write_manifest(outdir: Path, cfg: dict, command: str) -> None:
    # The output directory is where the manifest already sits; leaving it out
    # keeps manifests byte-identical across runs that differ only in where
    # they write.
    echo = {k: dict(v) for k, v in cfg.items()}
    echo["output"].pop("directory", None)
    write_json(
        outdir / "manifest.json",
        {"version": __version__, "command": command, "config": echo},
    )


def _wants(cfg: dict, fmt: str) -> bool:
    return fmt in cfg["output"]["formats"]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_groundstate(args) -> int:
    cfg, outdir = _resolve(args)
    p = params_from(cfg)
    kernel = kernel_from(cfg)
    gs = minimize(p, kernel, solve_options_from(cfg))
    _write_manifest(outdir, cfg, "groundstate")
    if _wants(cfg, "json"):
        write_json(outdir / "summary.json", gs.summary())
    if _wants(cfg, "csv") and gs.energy_history is not None:
        rows = [
            (i, e, r)
            for i, (e, r) in enumerate(zip(gs.energy_history, gs.residual_history))
        ]
        write_csv(outdir / "convergence.csv", ["iteration", "energy", "residual"], rows)
    if _wants(cfg, "snapshots"):
        write_field(outdir / "ground_state", gs.g, p.alpha, p.gamma, label="ground_state")
    require_converged(gs, "groundstate command")
    print(
        f"ground state: q={gs.q:g} E={gs.energy:.8e} omega={gs.omega:.8f} "
        f"residual={gs.residual:.3e} iterations={gs.iterations}"
    )
    return 0


def _initial_state(cfg, p, kernel):
    grid = kernel.grid if kernel is not None else grid_from(cfg)
    dyn = cfg["dynamics"]
    init = dyn["init"]
    q = float(cfg["solver"]["q"])
    if init == "groundstate":
        if kernel is None:
            raise ValueError(
                "dynamics.init 'groundstate' requires dynamics.hartree = true"
            )
        gs = minimize(p, kernel, solve_options_from(cfg))
        require_converged(gs, "evolve initial state")
        return gs.g
    if init == "gaussian":
        width = cfg["solver"]["initWidth"]
        return gaussian(
            grid,
            width=float(width) if width is not None else grid.L / 8.0,
            mass=q,
        )
    if init == "planeWave":
        mode = tuple(int(c) for c in dyn["planeWaveMode"])
        if len(mode) != grid.d:
            raise ValueError(
                f"dynamics.planeWaveMode must have {grid.d} components (got {mode})"
            )
        from .spectral import mass as field_mass

        psi = plane_wave(grid, mode)
        return psi * float(np.sqrt(q / field_mass(psi)))
    # anything else is a snapshot base path
    psi, _ = read_field(init)
    if psi.grid != grid:
        raise ValueError(
            f"snapshot grid {psi.grid} does not match configured grid {grid}"
        )
    return psi


def _cmd_evolve(args) -> int:
    cfg, outdir = _resolve(args)
    p = params_from(cfg)
    dyn = cfg["dynamics"]
    kernel = kernel_from(cfg) if dyn["hartree"] else None
    psi0 = _initial_state(cfg, p, kernel)
    traj = evolve(
        psi0,
        p,
        kernel,
        T=float(dyn["T"]),
        dt=float(dyn["dt"]),
        stride=int(dyn["snapshotStride"]),
        sign=int(dyn["sign"]),
    )
    report = conservation_report(traj)
    _write_manifest(outdir, cfg, "evolve")
    if _wants(cfg, "json"):
        write_json(
            outdir / "conservation.json",
            {
                "T": float(dyn["T"]),
                "dt": float(dyn["dt"]),
                "steps": traj.steps,
                "massDrift": report.mass_drift,
                "energyDrift": report.energy_drift,
            },
        )
    if _wants(cfg, "csv"):
        rows = list(zip(traj.times, traj.mass_series, traj.energy_series))
        write_csv(outdir / "series.csv", ["time", "mass", "energy"], rows)
    if _wants(cfg, "snapshots"):
        write_field(
            outdir / "final_state", traj.snapshots[-1], p.alpha, p.gamma, label="final_state"
        )
    print(
        f"evolved {traj.steps} steps to T={traj.times[-1]:g}: "
        f"mass drift {report.mass_drift:.3e}, energy drift {report.energy_drift:.3e}"
    )
    return 0


def _cmd_stability(args) -> int:
    cfg, outdir = _resolve(args)
    p = params_from(cfg)
    kernel = kernel_from(cfg)
    st = cfg["stability"]
    report = stability_run(
        p,
        kernel,
        delta=float(st["delta"]),
        T=float(st["T"]),
        dt=float(st["dt"]),
        seed=int(st["seed"]),
        stride=int(st["snapshotStride"]),
        solver_opts=solve_options_from(cfg),
    )
    _write_manifest(outdir, cfg, "stability")
    if _wants(cfg, "json"):
        write_json(outdir / "report.json", report.to_dict())
    if _wants(cfg, "csv"):
        write_csv(outdir / "distance_series.csv", ["time", "distance"], report.series_rows())
    print(
        f"stability: delta={report.delta:g} sup distance {report.sup_distance:.4e} "
        f"over T={report.T:g} (mass drift {report.mass_drift:.3e})"
    )
    return 0


def _cmd_rearrange_test(args) -> int:
    cfg, outdir = _resolve(args)
    grid = grid_from(cfg)
    alpha = float(cfg["physics"]["alpha"])
    count = int(cfg["rearrange"]["count"])
    seed = int(cfg["rearrange"]["seed"])
    norms_exact = True
    worst_seminorm = -np.inf
    for r in range(count):
        u = random_band_limited(grid, seed=seed + r)
        out = symmetric_rearrange(u)
        if not np.array_equal(
            np.sort(np.abs(u.values).ravel()), np.sort(out.values.real.ravel())
        ):
            norms_exact = False
        s_in = np.sqrt(sobolev_seminorm_sq(u, alpha))
        s_out = np.sqrt(sobolev_seminorm_sq(out, alpha))
        worst_seminorm = max(worst_seminorm, (s_out - s_in) / s_in)
    worst_pairing = -np.inf
    for r in range(count):
        f = random_band_limited(grid, seed=seed + 10_000 + 3 * r, kind="nonneg")
        g = random_band_limited(grid, seed=seed + 10_001 + 3 * r, kind="nonneg")
        h = random_band_limited(grid, seed=seed + 10_002 + 3 * r, kind="nonneg")
        lhs, rhs = riesz_check(f, g, h)
        worst_pairing = max(worst_pairing, (lhs - rhs) / abs(rhs))
    ok = (
        norms_exact
        and worst_seminorm <= _REARRANGE_SLACK
        and worst_pairing <= _REARRANGE_SLACK
    )
    _write_manifest(outdir, cfg, "rearrange-test")
    if _wants(cfg, "json"):
        write_json(
            outdir / "rearrange.json",
            {
                "fields": count,
                "normsExact": norms_exact,
                "worstSeminormExcess": float(worst_seminorm),
                "worstPairingExcess": float(worst_pairing),
                "slack": _REARRANGE_SLACK,
                "pass": ok,
            },
        )
    print(
        f"rearrangement over {count} fields: norms exact={norms_exact}, "
        f"worst seminorm excess {worst_seminorm:.3e}, "
        f"worst pairing excess {worst_pairing:.3e} -> {'PASS' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


def _cmd_verify(args) -> int:
    cfg, outdir = _resolve(args)

    def progress(res):
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {res.detail} ({res.seconds:.1f}s)")
        sys.stdout.flush()

    results = run_checks(level=args.level, seed=args.seed, only=args.only, progress=progress)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    _write_manifest(outdir, cfg, "verify")
    if _wants(cfg, "json"):
        write_json(
            outdir / "verify_report.json",
            {
                "level": args.level,
                "seed": args.seed,
                "passed": passed,
                "total": len(results),
                "checks": [
                    {"name": r.name, "passed": r.passed, "detail": r.detail}
                    for r in results
                ],
            },
        )
    return 0 if passed == len(results) else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument(
        "--set",
        action="append",
        metavar="SECTION.KEY=VALUE",
        help="override one configuration entry (repeatable; values parse as JSON)",
    )
    common.add_argument(
        "--output-dir", metavar="DIR", help="directory for result files"
    )
    common.add_argument(
        "--verbose", action="store_true", help="log solver/integrator progress"
    )

    parser = argparse.ArgumentParser(
        prog="fhnlse",
        description="Spectral laboratory for a fractional Schrodinger equation "
        "with a Hartree-type nonlocal interaction.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    p_gs = sub.add_parser(
        "groundstate", parents=[common], help="solve the mass-constrained minimization"
    )
    p_gs.set_defaults(func=_cmd_groundstate)

    p_ev = sub.add_parser(
        "evolve", parents=[common], help="integrate the time-dependent equation"
    )
    p_ev.set_defaults(func=_cmd_evolve)

    p_st = sub.add_parser(
        "stability", parents=[common], help="perturb the minimizer and evolve"
    )
    p_st.set_defaults(func=_cmd_stability)

    p_re = sub.add_parser(
        "rearrange-test",
        parents=[common],
        help="check the rearrangement inequalities on random fields",
    )
    p_re.set_defaults(func=_cmd_rearrange_test)

    p_ve = sub.add_parser(
        "verify", parents=[common], help="run the built-in verification checks"
    )
    p_ve.add_argument(
        "--level", choices=("quick", "full"), default="quick", help="check depth"
    )
    p_ve.add_argument("--only", metavar="SUBSTR", help="run only checks whose name contains this")
    p_ve.add_argument("--seed", type=int, default=1, help="seed for the random-field populations")
    p_ve.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_help(sys.stderr)
        return 2
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalAbort as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
