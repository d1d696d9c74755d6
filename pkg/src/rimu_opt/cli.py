"""Command-line front end.

Verbs: solve, eval, reference, montecarlo. Problems, configurations and
solutions travel as JSON (floats serialized with shortest round-tripping
repr, so files re-parse to the exact same doubles). Exit codes: 0 success,
1 input/validation error, 2 solver stopped at its iteration cap.

RIMU_OPT_LOG in {quiet, info, debug} controls verbosity; randomness flows
from --seed, which defaults to 0 rather than any time-based value.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from rimu_opt import __version__
from rimu_opt.errors import RimuOptError, SingularInformation
from rimu_opt.model import (
    FomKind,
    NoiseModel,
    SensorConfiguration,
    evaluate_fom,
    optimality_defect,
)
from rimu_opt.montecarlo import verify_covariance
from rimu_opt.references import build_reference
from rimu_opt.solver import SolverSettings, Solution, multi_start, solve

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2

_FOM_CODES = {"a": FomKind.A_TRACE, "d": FomKind.D_LOG_DET}
_SETTING_FIELDS = {
    "eps_outer": float,
    "max_outer_iters": int,
    "eps_inner": float,
    "max_inner_sweeps": int,
    "seed": int,
    "restarts": int,
}


class InputError(RimuOptError):
    """Invalid or malformed command input; mapped to exit code 1."""


def _configure_logging() -> None:
    level = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    name = os.environ.get("RIMU_OPT_LOG", "quiet").strip().lower() or "quiet"
    if name not in level:
        raise InputError(f"RIMU_OPT_LOG must be one of quiet, info, debug; got {name!r}")
    logging.basicConfig(level=level[name], format="%(levelname)s %(name)s: %(message)s")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object at top level")
    return data


def _matrix_field(data: dict, path: str, field: str) -> np.ndarray:
    if field not in data:
        raise InputError(f"{path}: missing field {field!r}")
    try:
        arr = np.array(data[field], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: field {field!r}: not a numeric array ({exc})") from exc
    if arr.ndim != 2:
        raise InputError(f"{path}: field {field!r}: expected a 2-d array, got {arr.ndim}-d")
    return arr


def _noise_from_file(data: dict, path: str) -> NoiseModel:
    r = _matrix_field(data, path, "R")
    if r.shape[0] != r.shape[1]:
        raise InputError(f"{path}: field 'R': covariance must be square, got {r.shape}")
    if "m" in data and int(data["m"]) != r.shape[0]:
        raise InputError(f"{path}: field 'm' ({data['m']}) disagrees with R shape {r.shape}")
    try:
        return NoiseModel.from_covariance(r)
    except RimuOptError as exc:
        raise InputError(f"{path}: field 'R': covariance not positive definite ({exc})") from exc


def _config_from_file(data: dict, path: str) -> SensorConfiguration:
    h = _matrix_field(data, path, "H")
    try:
        return SensorConfiguration(h)
    except RimuOptError as exc:
        raise InputError(f"{path}: field 'H': {exc}") from exc


def _settings_from_problem(data: dict, path: str, args: argparse.Namespace) -> SolverSettings:
    if "fom" not in data:
        raise InputError(f"{path}: missing field 'fom'")
    fom_code = data["fom"]
    if fom_code not in _FOM_CODES:
        raise InputError(f"{path}: field 'fom': expected \"a\" or \"d\", got {fom_code!r}")
    kwargs: dict = {"fom": _FOM_CODES[fom_code]}
    overrides = data.get("settings", {})
    if not isinstance(overrides, dict):
        raise InputError(f"{path}: field 'settings': expected an object")
    for key, value in overrides.items():
        if key not in _SETTING_FIELDS:
            raise InputError(f"{path}: field 'settings': unknown key {key!r}")
        kwargs[key] = _SETTING_FIELDS[key](value)
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.restarts is not None:
        kwargs["restarts"] = args.restarts
    try:
        return SolverSettings(**kwargs)
    except ValueError as exc:
        raise InputError(f"{path}: field 'settings': {exc}") from exc


def _solution_record(solution: Solution) -> dict:
    return {
        "H": solution.configuration.axes.tolist(),
        "objective": solution.objective,
        "fom": "a" if solution.fom is FomKind.A_TRACE else "d",
        "iterations": solution.outer_iters,
        "converged": solution.converged,
        "optimality_defect": optimality_defect(solution.configuration),
        "tool_version": __version__,
        "seed": solution.seed,
    }


def _write_json(record: dict, path: str | None) -> None:
    text = json.dumps(record, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _cmd_solve(args: argparse.Namespace) -> int:
    data = _load_json(args.problem)
    noise = _noise_from_file(data, args.problem)
    settings = _settings_from_problem(data, args.problem, args)
    h0 = None
    if "H0" in data:
        h0 = _config_from_file({"H": data["H0"]}, args.problem)
    if settings.restarts > 1:
        if h0 is not None:
            raise InputError(f"{args.problem}: H0 cannot be combined with restarts > 1")
        solution = multi_start(noise, settings)
    else:
        solution = solve(noise, settings, h0)
    _write_json(_solution_record(solution), args.out)
    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(solution.trace.csv_lines()) + "\n")
    return EXIT_OK if solution.converged else EXIT_NOT_CONVERGED


def _fom_record(config: SensorConfiguration, noise: NoiseModel, which: str) -> dict:
    record: dict = {}
    if which == "all":
        kinds = list(FomKind)
    else:
        kinds = [_FOM_CODES[which]]
    try:
        for kind in kinds:
            record[kind.value] = evaluate_fom(config, noise, kind)
    except SingularInformation as exc:
        raise InputError(f"configuration rank < 3 ({exc})") from exc
    record["optimality_defect"] = optimality_defect(config)
    return record


def _cmd_eval(args: argparse.Namespace) -> int:
    config = _config_from_file(_load_json(args.h_file), args.h_file)
    noise = _noise_from_file(_load_json(args.r_file), args.r_file)
    if noise.m != config.m:
        raise InputError(f"H has {config.m} rows but R is {noise.m}x{noise.m}")
    _write_json(_fom_record(config, noise, args.fom), args.out)
    return EXIT_OK


def _cmd_reference(args: argparse.Namespace) -> int:
    try:
        config = build_reference(args.kind, args.m, args.phase)
    except RimuOptError as exc:
        raise InputError(str(exc)) from exc
    record = {
        "H": config.axes.tolist(),
        "kind": args.kind,
        "m": config.m,
        "phase": args.phase,
        "optimality_defect": optimality_defect(config),
        "tool_version": __version__,
    }
    _write_json(record, args.out)
    return EXIT_OK


def _cmd_montecarlo(args: argparse.Namespace) -> int:
    config = _config_from_file(_load_json(args.h_file), args.h_file)
    noise = _noise_from_file(_load_json(args.r_file), args.r_file)
    if noise.m != config.m:
        raise InputError(f"H has {config.m} rows but R is {noise.m}x{noise.m}")
    try:
        report = verify_covariance(config, noise, np.zeros(3), args.samples, args.seed or 0)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    except SingularInformation as exc:
        raise InputError(f"configuration rank < 3 ({exc})") from exc
    record = {
        "samples": report.samples,
        "seed": report.seed,
        "relative_frobenius_error": report.relative_frobenius_error,
        "empirical_mean_error": report.empirical_mean_error.tolist(),
        "empirical_cov": report.empirical_cov.tolist(),
        "predicted_cov": report.predicted_cov.tolist(),
    }
    _write_json(record, args.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rimu-opt",
        description="Optimal orientation of redundant single-axis inertial sensors.",
    )
    parser.add_argument("--version", action="version", version=f"rimu-opt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("--problem", required=True, help="problem JSON path")
    p_solve.add_argument("--out", default=None, help="solution JSON path (default: stdout)")
    p_solve.add_argument("--trace", default=None, help="convergence trace CSV path")
    p_solve.add_argument("--seed", type=int, default=None, help="override the problem seed")
    p_solve.add_argument("--restarts", type=int, default=None, help="override the restart count")
    p_solve.set_defaults(func=_cmd_solve)

    p_eval = sub.add_parser("eval", help="evaluate figures of merit of a configuration")
    p_eval.add_argument("h_file", help="JSON file with an 'H' field")
    p_eval.add_argument("r_file", help="JSON file with an 'R' field")
    p_eval.add_argument("--fom", choices=["a", "d", "all"], default="all")
    p_eval.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p_eval.set_defaults(func=_cmd_eval)

    p_ref = sub.add_parser("reference", help="emit a closed-form reference geometry")
    p_ref.add_argument(
        "--kind",
        required=True,
        choices=["triad", "class1", "class2", "cube", "octahedron", "dodecahedron", "icosahedron"],
    )
    p_ref.add_argument("--m", type=int, default=None, help="sensor count (cones)")
    p_ref.add_argument("--phase", type=float, default=0.0, help="cone phase offset in radians")
    p_ref.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p_ref.set_defaults(func=_cmd_reference)

    p_mc = sub.add_parser("montecarlo", help="Monte-Carlo check of the error covariance")
    p_mc.add_argument("h_file", help="JSON file with an 'H' field")
    p_mc.add_argument("r_file", help="JSON file with an 'R' field")
    p_mc.add_argument("--samples", type=int, required=True)
    p_mc.add_argument("--seed", type=int, default=None, help="simulation seed (default 0)")
    p_mc.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p_mc.set_defaults(func=_cmd_montecarlo)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        _configure_logging()
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except RimuOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
