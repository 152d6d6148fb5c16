"""Command-line entry point.

Thin adapters only: every subcommand parses arguments (JSON config file plus
flag overrides), calls the library, and serializes results.  Index sets in
all JSON/CSV artifacts are 1-based; the library itself is 0-based.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .baselines import SpectralConfig, gmg_localize, spectral_localize
from .bench import (
    METHODS,
    error_curve_config,
    run_error_curve,
    run_timing,
    timing_config,
    unimodality_design,
    unimodality_grid,
    write_grid_csv,
    write_results_csv,
)
from .core import (
    PenaltyParams,
    critical_signal,
    multiscale_objective,
)
from .generate import (
    FAMILIES,
    GenerationSpec,
    generate,
    read_matrix_csv,
    write_matrix_csv,
    write_truth_json,
)
from .search import AdaptiveConfig, GssConfig, adaptive_las, exhaustive_search, gss

SEED_ENV_VAR = "BLOCKSCAN_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 for usage problems, not argparse's 2
        raise UsageError(message)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="blockscan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--config", type=Path, help="JSON file of option defaults; flags override")
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")

    p = sub.add_parser("generate", help="write a planted-block matrix CSV and truth JSON")
    add_common(p)
    p.add_argument("--family", choices=FAMILIES, default=None)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--m", type=int, default=None, help="planted row count")
    p.add_argument("--n", type=int, default=None, help="planted column count")
    p.add_argument("--theta", type=float, default=None, help="absolute signal strength")
    p.add_argument("--theta-mult", type=float, default=None, help="signal as a multiple of the critical level")
    p.add_argument("--out", default=None, help="output prefix (writes <out>.csv and <out>.json)")

    p = sub.add_parser("localize", help="run one method on a matrix CSV; prints selection JSON")
    add_common(p)
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--method", choices=("adaptive", "gss", "spectral", "gmg"), default=None)
    p.add_argument("--delta", type=float, default=None, help="penalty inflation (default 0)")
    p.add_argument("--m0", type=int, default=None, help="adaptive: initial row count (default 25)")
    p.add_argument("--n0", type=int, default=None, help="adaptive: initial column count (default 25)")
    p.add_argument("--restarts", type=int, default=None, help="adaptive: random restarts (default 50)")
    p.add_argument("--mbar", type=int, default=None, help="gss: row-size upper bound (default min(M, 500))")
    p.add_argument("--nbar", type=int, default=None, help="gss: column-size upper bound (default min(N, 500))")

    p = sub.add_parser("oracle", help="exact maximizer by exhaustive search (M <= 20 only)")
    add_common(p)
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--delta", type=float, default=None)

    p = sub.add_parser("bench-error", help="error-curve experiment; writes results CSV + config sidecar")
    add_common(p)
    p.add_argument("--scale", choices=("desk", "paper"), default=None)
    p.add_argument("--design", choices=("balanced", "imbalanced"), default=None)
    p.add_argument("--families", default=None, help="comma-separated subset of " + ",".join(FAMILIES))
    p.add_argument("--methods", default=None, help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--threads", type=int, default=None, help="worker processes; 0 = auto (default 1)")
    p.add_argument("--out", default=None, help="results CSV path (default results.csv)")
    p.add_argument("--with-timing", action="store_true", help="include measured millis in the CSV")
    p.add_argument("--plot", default=None, help="also write an SVG error-curve plot here")

    p = sub.add_parser("bench-time", help="timing experiment; CSV always includes millis")
    add_common(p)
    p.add_argument("--scale", choices=("desk", "paper"), default=None)
    p.add_argument("--methods", default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("unimodality", help="size-score landscape grid; writes raw/display CSVs + sidecar")
    add_common(p)
    p.add_argument("--design", choices=("balanced", "imbalanced"), default=None)
    p.add_argument("--theta-mult", type=float, default=None, help="signal multiplier (default 2.0)")
    p.add_argument("--las-restarts", type=int, default=None, help="scans per grid cell (default 100)")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="output prefix (default unimodality)")
    p.add_argument("--plot", default=None, help="also write an SVG level plot here")
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    """File values first, then any flag explicitly given on the command line."""
    merged: dict = {}
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {args.config} must hold a JSON object")
        merged.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None and value is not False:
            merged[key] = value
    return merged


def _resolve_theta(opts: dict, M: int, N: int, m: int, n: int) -> tuple[float, float | None]:
    theta = opts.get("theta")
    mult = opts.get("theta_mult")
    if theta is not None and mult is not None:
        raise UsageError("supply either --theta or --theta-mult, not both")
    if mult is not None:
        return float(mult) * critical_signal(M, N, m, n), float(mult)
    if theta is not None:
        return float(theta), None
    raise UsageError("one of --theta or --theta-mult is required")


def _cmd_generate(opts: dict) -> int:
    for field in ("family", "M", "N", "m", "n"):
        if field not in opts:
            raise UsageError(f"--{field} is required for generate")
    M, N, m, n = int(opts["M"]), int(opts["N"]), int(opts["m"]), int(opts["n"])
    theta, mult = _resolve_theta(opts, M, N, m, n)
    spec = GenerationSpec(
        family=opts["family"], M=M, N=N, m_star=m, n_star=n, theta=theta, seed=int(opts.get("seed", 0))
    )
    X, truth = generate(spec)
    prefix = str(opts.get("out", "planted"))
    write_matrix_csv(X, prefix + ".csv")
    extra = {"theta_mult": mult} if mult is not None else {}
    write_truth_json(prefix + ".json", spec, truth, extra=extra)
    print(f"wrote {prefix}.csv and {prefix}.json")
    return 0


def _cmd_localize(opts: dict) -> int:
    if "method" not in opts:
        raise UsageError("--method is required for localize")
    X = read_matrix_csv(opts["matrix"])
    M, N = X.shape
    method = opts["method"]
    penalty = PenaltyParams(float(opts.get("delta", 0.0)))
    seed = int(opts.get("seed", 0))
    if method == "adaptive":
        cfg = AdaptiveConfig(
            m0=min(int(opts.get("m0", 25)), M),
            n0=min(int(opts.get("n0", 25)), N),
            restarts=int(opts.get("restarts", 50)),
            penalty=penalty,
        )
        result = adaptive_las(X, cfg, seed=seed)
        sel, objective = result.selection, result.objective
    elif method == "gss":
        cfg = GssConfig(
            m_bar=int(opts.get("mbar", min(M, 500))),
            n_bar=int(opts.get("nbar", min(N, 500))),
            penalty=penalty,
        )
        result = gss(X, cfg, seed=seed)
        sel, objective = result.selection, result.objective
    elif method == "spectral":
        sel = spectral_localize(X, SpectralConfig(power_iter_max=100_000))
        objective = multiscale_objective(X, sel, penalty)
    elif method == "gmg":
        sel = gmg_localize(X)
        objective = multiscale_objective(X, sel, penalty)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown method {method!r}")
    print(_selection_json(sel, objective))
    return 0


def _cmd_oracle(opts: dict) -> int:
    X = read_matrix_csv(opts["matrix"])
    result = exhaustive_search(X, PenaltyParams(float(opts.get("delta", 0.0))))
    print(_selection_json(result.selection, result.objective))
    return 0


def _selection_json(sel, objective: float) -> str:
    return json.dumps(
        {
            "rows": [i + 1 for i in sel.rows],
            "cols": [j + 1 for j in sel.cols],
            "objective": objective,
        }
    )


def _split_list(value, allowed, what: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in str(value).split(",") if s.strip())
    unknown = set(names) - set(allowed)
    if unknown:
        raise UsageError(f"unknown {what} {sorted(unknown)}; expected a subset of {allowed}")
    if not names:
        raise UsageError(f"at least one {what} is required")
    return names


def _cmd_bench_error(opts: dict) -> int:
    cfg = error_curve_config(
        design=str(opts.get("design", "balanced")),
        scale=str(opts.get("scale", "desk")),
        families=_split_list(opts.get("families", "gaussian"), FAMILIES, "family"),
        methods=_split_list(opts.get("methods", ",".join(METHODS)), METHODS, "method"),
        seed=int(opts.get("seed", 0)),
        threads=int(opts.get("threads", 1)),
        output_path=str(opts.get("out", "results.csv")),
        replications=opts.get("replications"),
    )
    rows = run_error_curve(cfg)
    if opts.get("with_timing"):
        write_results_csv(rows, cfg.output_path, include_millis=True)
    print(f"wrote {cfg.output_path} ({len(rows)} rows)")
    if opts.get("plot"):
        from .plots import plot_error_curves

        plot_error_curves(cfg.output_path, opts["plot"])
        print(f"wrote {opts['plot']}")
    return 0


def _cmd_bench_time(opts: dict) -> int:
    cfg = timing_config(
        scale=str(opts.get("scale", "paper")),
        methods=_split_list(opts.get("methods", ",".join(METHODS)), METHODS, "method"),
        seed=int(opts.get("seed", 0)),
        threads=int(opts.get("threads", 1)),
        output_path=str(opts.get("out", "timing.csv")),
        replications=opts.get("replications"),
    )
    rows = run_timing(cfg)
    print(f"wrote {cfg.output_path} ({len(rows)} rows)")
    return 0


def _cmd_unimodality(opts: dict) -> int:
    design, m_bar, n_bar = unimodality_design(
        str(opts.get("design", "balanced")), theta_mult=float(opts.get("theta_mult", 2.0))
    )
    result = unimodality_grid(
        design,
        m_bar,
        n_bar,
        las_restarts=int(opts.get("las_restarts", 100)),
        seed=int(opts.get("seed", 0)),
        threads=int(opts.get("threads", 1)),
    )
    prefix = str(opts.get("out", "unimodality"))
    write_grid_csv(result.raw, prefix + "_raw.csv")
    write_grid_csv(result.display, prefix + "_display.csv")
    sidecar = {
        "spec": asdict(result.spec),
        "m_bar": result.m_bar,
        "n_bar": result.n_bar,
        "las_restarts": result.las_restarts,
        "seed": result.seed,
        "planted_rows": [i + 1 for i in result.truth.rows],
        "planted_cols": [j + 1 for j in result.truth.cols],
        "argmax_size": list(result.argmax_size),
    }
    Path(prefix + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    print(f"wrote {prefix}_raw.csv, {prefix}_display.csv and {prefix}.json")
    if opts.get("plot"):
        from .plots import plot_level

        plot_level(prefix + "_display.csv", opts["plot"])
        print(f"wrote {opts['plot']}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "localize": _cmd_localize,
    "oracle": _cmd_oracle,
    "bench-error": _cmd_bench_error,
    "bench-time": _cmd_bench_time,
    "unimodality": _cmd_unimodality,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        opts = _merge_config(args)
        if "seed" not in opts:
            opts["seed"] = _default_seed()
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
