"""Command line entry point ``lpfio``.

Exit codes: 0 on success, 2 when a verdict fails, 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .cones import build_directions, export_directions_csv
from .fio import FioOperator, apply_operator, named_amplitude, named_phase
from .grid import GridFunction, GridSpec, load_grid_function, lp_quasinorm, read_grid_csv, write_grid_csv
from .littlewood_paley import build_cutoffs, export_cutoffs_csv
from .reports import Report, write_report
from .selftest import run_selftest
from .spaces import SpaceParams, band_pieces, space_norm

log = logging.getLogger("lpfio")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON file with experiment settings")
    p.add_argument("--out", type=Path, default=Path("reports"), help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--n", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--p", type=str, help="exponent, 'inf' allowed")
    p.add_argument("--q", type=str)
    p.add_argument("--s", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--phase", type=str, help="linear, wave, anisotropic or an expression in x1, x2, xi1, xi2")
    p.add_argument("--t", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpfio", description="Littlewood-Paley and FIO experiments on periodic grids")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="Besov or Triebel-Lizorkin quasi-norm of a grid function")
    _common(p)
    p.add_argument("--kind", choices=["B", "F"], default="B")
    p.add_argument("--input", type=Path, help="grid function (.csv text or .bin/.json pair); random if omitted")

    p = sub.add_parser("decompose", help="band norms and the radial cutoff table")
    _common(p)
    p.add_argument("--input", type=Path)

    p = sub.add_parser("fio-apply", help="apply a Fourier integral operator to a grid function")
    _common(p)
    p.add_argument("--input", type=Path)
    p.add_argument("--amplitude", default="jap_m", help="one, jap_m or compact_x")
    p.add_argument("--window", default="all", choices=["all", "low", "high", "band"])
    p.add_argument("--level", type=int)
    p.add_argument("--method", default="auto", choices=["auto", "multiplier", "direct"])

    p = sub.add_parser("cones", help="cone partition check and direction table")
    _common(p)
    p.add_argument("--j", type=int, default=4, help="level for the exported direction table")

    for name, help_text in (
        ("scaling", "band scaling exponent of a frequency-localized FIO"),
        ("wave-sweep", "Besov/Triebel estimate ratios for the wave equation"),
        ("atoms", "uniformity of FIO images of atoms"),
        ("sharpness-1d", "one-dimensional tail and quasi-norm growth"),
        ("envelope", "envelope constants of cone-localized kernels"),
        ("kernel-decay", "decay of low-frequency kernels"),
    ):
        p = sub.add_parser(name, help=help_text)
        _common(p)
        if name == "scaling":
            p.add_argument("--corpus", choices=["random", "focusing", "knapp"])
            p.add_argument("--levels", type=int, nargs=2)

    sub.add_parser("selftest", help="run the quick exactness checks")
    return parser


# -- configuration -----------------------------------------------------------------


def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    data.pop("experiment", None)
    return data


def _exp_value(text: str):
    return "inf" if text.strip().lower() in ("inf", "infinity") else float(text)


def _grid_overrides(args, base: dict) -> dict:
    g = dict(base)
    for key in ("n", "N", "L"):
        v = getattr(args, key)
        if v is not None:
            g[key] = v
    return g


def _overrides(command: str, args, settings: dict) -> dict:
    o = json.loads(json.dumps(settings))
    if command in ("scaling", "atoms", "envelope"):
        o["grid"] = _grid_overrides(args, o.get("grid", {}))
        op = o.setdefault("operator", {})
        if args.m is not None:
            op["m"] = args.m
        if args.phase is not None:
            op["phase"] = args.phase
        if args.t is not None:
            op["t"] = args.t
    if command == "scaling":
        if args.p is not None:
            o["p"] = _exp_value(args.p)
        if args.seed is not None:
            o.setdefault("corpus", {})["seed"] = args.seed
        if args.corpus is not None:
            o.setdefault("corpus", {})["kind"] = args.corpus
        if args.levels is not None:
            o["levels"] = list(args.levels)
    elif command == "atoms":
        if args.p is not None:
            o["p"] = [_exp_value(args.p)]
        if args.seed is not None:
            o.setdefault("corpus", {})["seed"] = args.seed
    elif command == "wave-sweep":
        if args.n is not None or args.N is not None or args.L is not None:
            n = args.n or 2
            N = args.N or 256
            L = args.L or 8.0
            o["grids"] = [
                {"label": "base", "n": n, "L": L, "N": N},
                {"label": "N-doubled", "n": n, "L": L, "N": 2 * N},
                {"label": "L-doubled", "n": n, "L": 2 * L, "N": 2 * N},
            ]
        if args.p is not None:
            o["p"] = [_exp_value(args.p)]
        if args.s is not None:
            o["s"] = [args.s]
        if args.t is not None:
            o["t"] = [args.t]
        if args.seed is not None:
            o.setdefault("corpus", {})["seed"] = args.seed
    elif command == "sharpness-1d":
        tail = o.setdefault("tail", {})
        if args.L is not None:
            tail["L"] = args.L
        if args.N is not None:
            tail["N"] = args.N
        if args.p is not None:
            o.setdefault("growth", {})["p"] = [_exp_value(args.p)]
    elif command == "kernel-decay":
        if args.n is not None or args.N is not None or args.L is not None:
            o["cases"] = [{"n": args.n or 1, "L": args.L or 1024.0, "N": args.N or 16384}]
        if args.phase is not None:
            o["phases"] = [args.phase]
    elif command == "cones" and args.seed is not None:
        o["seed"] = args.seed
    return o


# -- commands ---------------------------------------------------------------------------


def _input_function(args) -> GridFunction:
    if args.input is not None:
        if not args.input.exists() and not args.input.with_suffix(".json").exists():
            raise UsageError(f"input file not found: {args.input}")
        return read_grid_csv(args.input) if args.input.suffix == ".csv" else load_grid_function(args.input)
    spec = GridSpec(args.n or 1, args.L or 2 * math.pi, args.N or 256)
    rng = np.random.default_rng(args.seed or 0)
    return GridFunction(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))


def _grid_config(spec: GridSpec) -> dict:
    return {"n": spec.n, "L": spec.L, "N": spec.N}


def _cmd_norm(args) -> Report:
    f = _input_function(args)
    p = _exp_value(args.p) if args.p else 2.0
    q = _exp_value(args.q) if args.q else 2.0
    params = SpaceParams(args.kind, args.s or 0.0, p, q)
    fam = build_cutoffs(f.spec)
    value = space_norm(f, params, fam)
    config = {"command": "norm", "grid": _grid_config(f.spec), "kind": args.kind, "s": params.s, "p": p, "q": q,
              "input": str(args.input) if args.input else None, "seed": args.seed}
    print(f"{params.label()}: {value:.17g}")
    return Report("norm", config, ["kind", "s", "p", "q", "J", "value"],
                  [(params.kind, params.s, params.p, params.q, f.spec.J, value)], {}, {"value": value})


def _cmd_decompose(args) -> Report:
    f = _input_function(args)
    fam = build_cutoffs(f.spec)
    p = _exp_value(args.p) if args.p else 2.0
    bands = band_pieces(f, fam)
    rows = [(j, lp_quasinorm(GridFunction(f.spec, bands[j]), p)) for j in fam.levels]
    args.out.mkdir(parents=True, exist_ok=True)
    export_cutoffs_csv(fam, args.out / "cutoffs.csv")
    config = {"command": "decompose", "grid": _grid_config(f.spec), "p": p,
              "input": str(args.input) if args.input else None, "seed": args.seed}
    return Report("decompose", config, ["j", "band_norm"], rows, {}, {"J": f.spec.J})


def _cmd_fio(args) -> Report:
    f = _input_function(args)
    fam = build_cutoffs(f.spec)
    amp = named_amplitude(args.amplitude, args.m or 0.0)
    phase = named_phase(args.phase or "wave", args.t if args.t is not None else 1.0, f.spec.n)
    if args.window == "band" and args.level is None:
        raise UsageError("--window band needs --level")
    op = FioOperator(amp, phase, args.window, args.level)
    out = apply_operator(op, f, fam, method=args.method, workers=args.threads)
    args.out.mkdir(parents=True, exist_ok=True)
    write_grid_csv(out, args.out / "fio_output.csv")
    p = _exp_value(args.p) if args.p else 2.0
    config = {"command": "fio-apply", "grid": _grid_config(f.spec), "amplitude": args.amplitude, "m": args.m or 0.0,
              "phase": phase.name, "window": args.window, "level": args.level, "method": args.method, "p": p}
    num, den = lp_quasinorm(out, p), lp_quasinorm(f, p)
    return Report("fio_apply", config, ["p", "input_norm", "output_norm"], [(p, den, num)], {}, {"ratio": num / den})


def _cmd_cones(args, settings) -> Report:
    config = ex.ExperimentConfig.build("cone-partition", _overrides("cones", args, settings))
    report = ex.run_experiment(config, args.threads)
    export_directions_csv(build_directions(args.j, 2), args.out / f"directions_j{args.j}.csv")
    return report


_EXPERIMENT_COMMANDS = ("scaling", "wave-sweep", "atoms", "sharpness-1d", "envelope", "kernel-decay")


def run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "selftest":
        ok = True
        for name, err, tol, passed in run_selftest():
            print(f"{'PASS' if passed else 'FAIL'} {name}: error {err:.3g} (tolerance {tol:g})")
            ok &= passed
        return 0 if ok else 2
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    settings = _load_config(args.config)
    if args.command in _EXPERIMENT_COMMANDS:
        config = ex.ExperimentConfig.build(args.command, _overrides(args.command, args, settings))
        report = ex.run_experiment(config, args.threads)
    elif args.command == "cones":
        args.out.mkdir(parents=True, exist_ok=True)
        report = _cmd_cones(args, settings)
    elif args.command == "norm":
        report = _cmd_norm(args)
    elif args.command == "decompose":
        report = _cmd_decompose(args)
    else:
        report = _cmd_fio(args)
    paths = write_report(report, args.out)
    for verdict, value in report.verdicts.items():
        print(f"{'PASS' if value else 'FAIL'} {verdict}")
    print(f"wrote {paths['csv']} and {paths['json']}")
    return 0 if report.passed else 2


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"lpfio: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
