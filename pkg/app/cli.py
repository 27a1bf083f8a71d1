"""
Command line for point/graph export, single-graph spectra and matchings,
closed-form bounds and the three experiment runners.

    python -m app.cli concentration --dim 2 --side 16 --side 32 --trials 10 --out conc.csv
"""
import argparse
import logging
import sys
from typing import Dict, List, Optional

import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError

from app.config import get_settings
from app.errors import ConfigurationError, SpectraError
from app.schemas import BoundParams, ExperimentConfig, RadiusSchedule
from app.services import bounds, export
from app.services.experiments import run_concentration, run_conjecture, run_reciprocal_mc, summarize
from app.services.geometry import make_grid, radius, sample_uniform
from app.services.graph import build_rgg, write_edge_list
from app.services.matching import bottleneck_matching
from app.services.spectra import walk_spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

# flags that collect several values; in a config file they are comma-separated
LIST_KEYS = {"dim": int, "side": int, "t": float, "n": int, "p": float}
SCALAR_KEYS = {
    "trials": int,
    "seed": int,
    "c": float,
    "beta": float,
    "cd": str,
    "out": str,
    "workers": int,
    "draws": int,
    "kind": str,
    "edges": str,
    "summary_out": str,
    "r": float,
}


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--dim", type=int, action="append", help="Dimension d (repeatable)")
    parent.add_argument("--side", type=int, action="append", help="Grid side m, n = m^d (repeatable)")
    parent.add_argument("--trials", type=int, help="Trials per (d, m)")
    parent.add_argument("--seed", type=int, help="Master seed")
    parent.add_argument("--c", type=float, help="Radius schedule constant c")
    parent.add_argument("--beta", type=float, help="Radius schedule exponent beta")
    parent.add_argument("--t", type=float, action="append", help="Deviation parameter (repeatable)")
    parent.add_argument("--cd", type=str, help="c_d mode: fixed:<v> or feasible")
    parent.add_argument("--out", type=str, help="Output CSV path")
    parent.add_argument("--workers", type=int, help="Worker processes for trials")
    parent.add_argument("--config", type=str, help="key=value file mirroring the flags")
    parent.add_argument("--log-level", type=str, help="Logging level (default from RGG_LOG_LEVEL)")
    return parent


def build_parser() -> CliParser:
    parser = CliParser(prog="rgg-spectra", description="Spectra of random geometric graphs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)
    common = _common()

    p = sub.add_parser("generate", parents=[common], help="Export a sampled or grid point set (and its graph)")
    p.add_argument("--kind", choices=["sampled", "grid"], help="Point set kind (default sampled)")
    p.add_argument("--edges", type=str, help="Also write the RGG edge list here")

    p = sub.add_parser("spectrum", parents=[common], help="SRW spectrum of one graph")
    p.add_argument("--kind", choices=["sampled", "grid"], help="Point set kind (default sampled)")
    p.add_argument("--r", type=float, help="Radius (default from the schedule)")

    sub.add_parser("match", parents=[common], help="Bottleneck matching of a sample to the grid")

    p = sub.add_parser("bounds", parents=[common], help="Evaluate the closed-form tail bounds")
    p.add_argument("--n", type=int, action="append", help="Vertex count (repeatable; default m^d)")
    p.add_argument("--r", type=float, help="Radius (default from the schedule)")

    sub.add_parser("concentration", parents=[common], help="Sampled vs grid concentration run")

    p = sub.add_parser("conjecture", parents=[common], help="Sorted mean-square statistic run")
    p.add_argument("--summary-out", type=str, help="Summary CSV (default <out>.summary.csv)")

    p = sub.add_parser("recbound", parents=[common], help="Binomial reciprocal tail audit")
    p.add_argument("--n", type=int, action="append", help="Binomial n (repeatable)")
    p.add_argument("--p", type=float, action="append", help="Binomial p (repeatable)")
    p.add_argument("--draws", type=int, help="Monte Carlo draws per (n, p)")
    return parser


def _from_file(path: str) -> Dict:
    if not path:
        return {}
    raw = dotenv_values(path)
    values = {}
    for key, text in raw.items():
        key = key.strip().lower().replace("-", "_")
        if text is None or text == "":
            continue
        try:
            if key in LIST_KEYS:
                values[key] = [LIST_KEYS[key](item) for item in text.split(",") if item.strip()]
            elif key in SCALAR_KEYS:
                values[key] = SCALAR_KEYS[key](text)
            else:
                raise ConfigurationError(f"unknown key {key!r} in {path}")
        except ValueError as e:
            if isinstance(e, ConfigurationError):
                raise
            raise ConfigurationError(f"bad value for {key!r} in {path}: {text!r}") from e
    return values


def merged_options(args: argparse.Namespace) -> Dict:
    """Config file values, overridden by every flag given on the command line"""
    options = _from_file(args.config)
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command", "log_level"):
            options[key] = value
    return options


def _schedule(options: Dict) -> Optional[RadiusSchedule]:
    """Given --c and --beta only; the rest is filled per dimension when a radius is computed"""
    if "c" not in options and "beta" not in options:
        return None
    return RadiusSchedule(c=options.get("c"), beta=options.get("beta"))


def experiment_config(options: Dict) -> ExperimentConfig:
    fields = {
        "dims": options.get("dim"),
        "sides": options.get("side"),
        "schedule": _schedule(options),
        "trials": options.get("trials"),
        "master_seed": options.get("seed"),
        "c_d_mode": options.get("cd"),
        "t_grid": options.get("t"),
        "output_path": options.get("out"),
        "workers": options.get("workers"),
    }
    return ExperimentConfig(**{k: v for k, v in fields.items() if v is not None})


def _require_out(config: ExperimentConfig) -> str:
    if not config.output_path:
        raise ConfigurationError("--out is required")
    return config.output_path


def _metadata(command: str, config: ExperimentConfig) -> Dict:
    # no output_path: reruns into different files stay byte-identical
    config_json = config.model_dump_json(exclude={"output_path"})
    return {"command": command, "config": config_json, "master_seed": config.master_seed}


def _point_set(kind: str, d: int, m: int, seed: int):
    if kind == "grid":
        return make_grid(m, d)
    return sample_uniform(m ** d, d, seed)


def _radius(config: ExperimentConfig, n: int, d: int) -> float:
    return radius(config.schedule, n, d)


def cmd_generate(config: ExperimentConfig, options: Dict) -> None:
    out = _require_out(config)
    d, m = config.dims[0], config.sides[0]
    points = _point_set(options.get("kind", "sampled"), d, m, config.master_seed)
    export.write_points_csv(points, out, _metadata("generate", config))
    if options.get("edges"):
        g = build_rgg(points, _radius(config, points.n, d))
        write_edge_list(g, options["edges"])
        logger.info(f"wrote {g.edge_count} edges to {options['edges']}")


def cmd_spectrum(config: ExperimentConfig, options: Dict) -> None:
    out = _require_out(config)
    d, m = config.dims[0], config.sides[0]
    points = _point_set(options.get("kind", "sampled"), d, m, config.master_seed)
    r = options.get("r") or _radius(config, points.n, d)
    spectrum = walk_spectrum(build_rgg(points, r))
    export.write_spectrum_csv(spectrum, out, {"r": repr(r), **_metadata("spectrum", config)})


def cmd_match(config: ExperimentConfig, options: Dict) -> None:
    out = _require_out(config)
    d, m = config.dims[0], config.sides[0]
    X = sample_uniform(m ** d, d, config.master_seed)
    D = make_grid(m, d)
    matching = bottleneck_matching(X, D)
    logger.info(f"M_n = {matching.bottleneck:.6g} for n={X.n}, d={d}")
    export.write_matching_csv(X, D, matching, out, _metadata("match", config))


def bounds_frame(config: ExperimentConfig, options: Dict) -> pd.DataFrame:
    rows = []
    for d in config.dims:
        ns = options.get("n") or [m ** d for m in config.sides]
        for n in ns:
            r = options.get("r") or _radius(config, n, d)
            a = bounds.a_of_n(n, d, r)
            for t in config.t_grid:
                c_d = config.c_d_mode.value if config.c_d_mode.kind == "fixed" else bounds.c_d_feasible(t, 0.0, d)
                params = BoundParams(n=n, d=d, r=r, t=t, c_d=c_d)
                hs = bounds.hs_tail_bound(params)
                ws = bounds.ws_tail_bound(params)
                rows.append(
                    {
                        "d": d,
                        "n": n,
                        "r": r,
                        "a_n": a,
                        "t": t,
                        "c_d": c_d,
                        "hs_bound": hs,
                        "hs_informative": bounds.is_informative(hs),
                        "ws_bound": ws,
                        "ws_informative": bounds.is_informative(ws),
                        "reciprocal_bound": bounds.reciprocal_tail_bound(t, a),
                        "hs_threshold": bounds.hs_threshold(t, a),
                        "ws_threshold": bounds.ws_threshold(t, a),
                    }
                )
    return pd.DataFrame(rows)


def cmd_bounds(config: ExperimentConfig, options: Dict) -> None:
    df = bounds_frame(config, options)
    if config.output_path:
        export.write_frame(df, config.output_path, _metadata("bounds", config))
    else:
        print(df.to_string(index=False))


def cmd_concentration(config: ExperimentConfig, options: Dict) -> None:
    out = _require_out(config)
    records = run_concentration(config)
    export.emit_csv(records, out, _metadata("concentration", config))
    summary = summarize(records)
    for _, row in summary.iterrows():
        logger.info(
            f"d={row['d']} n={row['n']}: median W1={row['median_w1_dist']:.6g}, "
            f"median M_n/r={row['median_M_over_r']:.4g}, disconnected {row['disconnected']}/{row['trials']}"
        )


def cmd_conjecture(config: ExperimentConfig, options: Dict) -> None:
    out = _require_out(config)
    records, summaries = run_conjecture(config)
    metadata = _metadata("conjecture", config)
    export.emit_csv(records, out, metadata)
    if summaries:
        export.emit_csv(summaries, options.get("summary_out") or f"{out}.summary.csv", metadata)
    else:
        logger.warning("every trial was disconnected; no summary rows")


def cmd_recbound(config: ExperimentConfig, options: Dict) -> None:
    out = _require_out(config)
    records = run_reciprocal_mc(
        options.get("n") or [50, 200, 1000],
        options.get("p") or [0.1, 0.3, 0.5],
        options.get("t") or [0.25, 0.5, 1.0],
        draws=options.get("draws", 100_000),
        master_seed=config.master_seed,
    )
    export.emit_csv(records, out, _metadata("recbound", config))
    failed = [rec for rec in records if rec.warning == "" and not rec.within_bound]
    if failed:
        logger.warning(f"{len(failed)} grid points exceed bound + 3 SE")


COMMANDS = {
    "generate": cmd_generate,
    "spectrum": cmd_spectrum,
    "match": cmd_match,
    "bounds": cmd_bounds,
    "concentration": cmd_concentration,
    "conjecture": cmd_conjecture,
    "recbound": cmd_recbound,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = args.log_level or get_settings().log_level
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO))

    try:
        options = merged_options(args)
        config = experiment_config(options)
        COMMANDS[args.command](config, options)
    except (ValidationError, ConfigurationError) as e:
        logger.error(f"invalid configuration: {e}")
        return EXIT_USAGE
    except (SpectraError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
