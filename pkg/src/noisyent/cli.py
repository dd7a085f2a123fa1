"""Command-line pipeline: synth -> simulate -> reconstruct -> analyze, plus homfit.

Exit codes: 0 success, 2 input or usage error, 3 numerical failure.
Every command that writes ``--out PATH`` also writes ``PATH.manifest.json``
recording the command, its arguments and seed.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import analysis_report
from .errors import ArgumentError, DataError, FitError, NumericError
from .hom import fit_gaussian_dip, hom_model, read_curve_csv
from .io import dumps, load_dataset, load_schedule, load_state, read_json, state_from_dict, state_to_dict
from .qmat import ket_to_dm
from .states import (BellKind, apply_schedule, bell_state, phi_plus_pairs, private_schedule, private_state,
                     smolin_schedule, smolin_state)
from .tomography import ExperimentConfig, MleOptions, bootstrap_ensemble, mle_reconstruct, simulate_counts

EXIT_INPUT = 2
EXIT_NUMERIC = 3

log = logging.getLogger("noisyent")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _manifest(args, out: str | None, **extra) -> None:
    if not out:
        return
    skip = {"func"}
    manifest = {
        "command": args.command,
        "tool_version": __version__,
        "rng_seed": args.seed,
        "arguments": {k: v for k, v in sorted(vars(args).items()) if k not in skip},
        "output": out,
        **extra,
    }
    Path(out + ".manifest.json").write_text(dumps(manifest))


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        fourfold_rate_hz=args.rate_hz,
        duration_per_setting_s=args.duration_s,
        collection_mode=args.mode,
        misalign_sigma=args.misalign_sigma,
        rng_seed=args.seed,
        pair_rate_hz=args.pair_rate_hz,
        dead_time=args.dead_time,
    )


def cmd_synth(args) -> int:
    name = args.state
    if name == "smolin":
        rho = apply_schedule(phi_plus_pairs(), smolin_schedule(), args.misalign_sigma, args.seed)
    elif name == "private":
        rho = apply_schedule(phi_plus_pairs(), private_schedule(), args.misalign_sigma, args.seed)
    elif name == "custom-schedule":
        if not args.schedule:
            raise ArgumentError("custom-schedule needs --schedule FILE")
        rho = apply_schedule(phi_plus_pairs(), load_schedule(args.schedule), args.misalign_sigma, args.seed)
    elif name.startswith("bell:"):
        try:
            kind = BellKind(name.split(":", 1)[1])
        except ValueError:
            raise ArgumentError(f"unknown Bell state {name!r}") from None
        rho = ket_to_dm(bell_state(kind))
    else:
        raise ArgumentError(f"unknown state {name!r}")
    _emit(dumps(state_to_dict(rho)), args.out)
    _manifest(args, args.out)
    return 0


def cmd_simulate(args) -> int:
    rho = load_state(args.state_file)
    cfg = _config(args)
    data = simulate_counts(rho, cfg)
    _emit(dumps(data.to_dict()), args.out)
    _manifest(args, args.out, config=cfg.to_dict())
    return 0


def cmd_reconstruct(args) -> int:
    data = load_dataset(args.dataset_file)
    opts = MleOptions(max_iter=args.max_iter, polish=not args.no_polish)
    rho, diag = mle_reconstruct(data, opts)
    diag_path = args.out + ".diagnostics.json" if args.out else None
    if not diag.converged:
        if diag_path:
            Path(diag_path).write_text(dumps(diag.to_dict()))
        log.error("reconstruction did not converge after %d iterations", diag.iterations)
        return EXIT_NUMERIC
    _emit(dumps(state_to_dict(rho)), args.out)
    if diag_path:
        Path(diag_path).write_text(dumps(diag.to_dict()))
    _manifest(args, args.out, diagnostics=diag_path)
    return 0


def _target(spec: str) -> np.ndarray:
    if spec == "smolin":
        return smolin_state()
    if spec == "private":
        return private_state()
    if spec.startswith("file:"):
        return load_state(spec[5:])
    raise ArgumentError(f"unknown target {spec!r}")


def _ppt_csv(report: dict) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["partition", "index", "eigenvalue"])
    for p in report["ppt"]:
        for i, x in enumerate(p["eigenvalues"]):
            w.writerow([p["partition"], i, repr(x)])
    return buf.getvalue()


def cmd_analyze(args) -> int:
    rho = load_state(args.state_file)
    target = _target(args.target)
    ensemble = None
    cfg = None
    if args.bootstrap_n:
        cfg = _config(args)
        ensemble = bootstrap_ensemble(rho, cfg, args.bootstrap_n, n_jobs=args.jobs)
    report = analysis_report(rho, target, ensemble)
    if args.format == "csv":
        _emit(_ppt_csv(report), args.out)
    else:
        _emit(dumps(report), args.out)
    _manifest(args, args.out, config=None if cfg is None else cfg.to_dict())
    return 0


def cmd_homfit(args) -> int:
    curve = read_curve_csv(args.curve_csv)
    fit = fit_gaussian_dip(curve)
    _emit(dumps(fit.to_dict()), args.out)
    if args.out:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delay", "model"])
        for t, y in zip(curve.delays, hom_model(fit, curve.delays)):
            w.writerow([repr(float(t)), repr(float(y))])
        model_path = args.out + ".model.csv"
        Path(model_path).write_text(buf.getvalue())
        _manifest(args, args.out, model_curve=model_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    counting = argparse.ArgumentParser(add_help=False)
    counting.add_argument("--rate-hz", type=float, default=2.0, help="four-fold coincidence rate")
    counting.add_argument("--duration-s", type=float, default=3600.0, help="counting time per setting")
    counting.add_argument("--mode", choices=["pulsed", "fast"], default="pulsed")
    counting.add_argument("--pair-rate-hz", type=float, default=1e4, help="two-fold rate used by fast mode")
    counting.add_argument("--misalign-sigma", type=float, default=0.0, help="analyzer angle jitter, rad")
    counting.add_argument("--dead-time", action="store_true", help="discount motor pauses from each setting")

    parser = argparse.ArgumentParser(prog="noisyent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="write an ideal or noisy state")
    p.add_argument("state", help="smolin | private | bell:<kind> | custom-schedule")
    p.add_argument("--misalign-sigma", type=float, default=0.0, help="noise-plate angle jitter, rad")
    p.add_argument("--schedule", default=None, help="schedule JSON for custom-schedule")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", parents=[common, counting], help="simulate tomography counts")
    p.add_argument("state_file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", parents=[common], help="maximum-likelihood reconstruction")
    p.add_argument("dataset_file")
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--no-polish", action="store_true", help="R-rho-R iteration only, no L-BFGS refinement")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("analyze", parents=[common, counting], help="fidelity, witness, PPT, CHSH report")
    p.add_argument("state_file")
    p.add_argument("--target", default="smolin", help="smolin | private | file:<path>")
    p.add_argument("--bootstrap-n", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("homfit", parents=[common], help="Gaussian fit of a HOM dip scan")
    p.add_argument("curve_csv")
    p.set_defaults(func=cmd_homfit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ArgumentError, DataError, FileNotFoundError, IsADirectoryError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except (NumericError, FitError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
