"""Command-line entry point ``qspec``."""
from __future__ import annotations

import argparse
import os
import sys

from ..analysis import ground_truth
from ..calibration import calibrate, load_bands, save_bands
from ..core import EstimationPlan
from ..errors import ConfigError
from ..estimator import sweep
from ..models import preset, simulate
from .config import RunConfig, load_config
from .io import atomic_write, export_field, import_field, ingest_csv, write_series
from .render import render_heatmap
from .returns import returns_workflow

DEFAULT_T = 4096


def _plan(cfg: RunConfig, T: int) -> EstimationPlan:
    return EstimationPlan.build(T, cfg.n, cfg.bandwidth, cfg.quantiles, cfg.kernel,
                                stride=cfg.stride)


def _column(cfg: RunConfig):
    return int(cfg.column) if cfg.column.lstrip("-").isdigit() else cfg.column


def _need(value, flag: str):
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


def _out(cfg: RunConfig, default: str) -> str:
    return cfg.out or default


def cmd_simulate(cfg: RunConfig) -> str:
    x = simulate(preset(cfg.preset), cfg.T or DEFAULT_T, cfg.seed)
    path = _out(cfg, "series.csv")
    write_series(x, path)
    return path


def cmd_estimate(cfg: RunConfig) -> str:
    x = ingest_csv(_need(cfg.input, "--input"), _column(cfg))
    field = sweep(x, _plan(cfg, x.size))
    path = _out(cfg, "field.csv")
    export_field(field, path)
    return path


def cmd_calibrate(cfg: RunConfig) -> str:
    plan = EstimationPlan.single_window(cfg.n, cfg.bandwidth, cfg.quantiles, cfg.kernel)
    bands = calibrate(plan, cfg.M, cfg.seed, cfg.innovations)
    path = _out(cfg, cfg.bands or "bands.txt")
    save_bands(bands, path)
    return path


def cmd_truth(cfg: RunConfig) -> str:
    plan = _plan(cfg, cfg.T or DEFAULT_T)
    field = ground_truth(preset(cfg.preset), plan, cfg.R, cfg.length, cfg.seed)
    path = _out(cfg, "truth.csv")
    export_field(field, path)
    return path


def _pair(text: str | None):
    if text is None:
        return None
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"--pair expects 'tau1,tau2,part', got {text!r}")
    return float(parts[0]), float(parts[1]), parts[2]


def cmd_render(cfg: RunConfig, pair=None) -> str:
    field = import_field(_need(cfg.field or cfg.input, "--field"))
    bands = load_bands(_need(cfg.bands, "--bands"))
    return render_heatmap(field, bands, _out(cfg, "heatmap.png"), pairs=_pair(pair))


def cmd_returns(cfg: RunConfig, candidates=None) -> str:
    prices = ingest_csv(_need(cfg.input, "--input"), _column(cfg))
    fields = [import_field(p) for p in candidates] if candidates else None
    res = returns_workflow(prices, lambda T: _plan(cfg, T), cfg.J, cfg.seed,
                           cfg.variance_halfwidth, cfg.fixed_divisor, candidates=fields)
    out = _out(cfg, "returns-out")
    os.makedirs(out, exist_ok=True)
    write_series(res.returns, os.path.join(out, "returns.csv"))
    write_series(res.sigma.values, os.path.join(out, "sigma.csv"))
    export_field(res.field, os.path.join(out, "field.csv"))
    if res.bootstraps:
        write_series(res.best_series, os.path.join(out, "best_series.csv"))
        export_field(res.fields[res.best_index - 1], os.path.join(out, "best_field.csv"))
    with atomic_write(os.path.join(out, "match.txt")) as fh:
        fh.write(f"best_index = {res.best_index}\n")
        fh.write(f"best_distance = {res.best_distance:.17g}\n")
        for j, d in enumerate(res.distances, 1):
            fh.write(f"distance {j} = {d:.17g}\n")
    if cfg.render and cfg.bands:
        bands = load_bands(cfg.bands)
        render_heatmap(res.field, bands, os.path.join(out, "field.png"))
        if res.bootstraps:
            render_heatmap(res.fields[res.best_index - 1], bands,
                           os.path.join(out, "best_field.png"))
    return out


COMMANDS = {
    "simulate": ("simulate a model preset to a series CSV", cmd_simulate),
    "estimate": ("estimate a spectral field from a series CSV", cmd_estimate),
    "calibrate": ("simulate white-noise significance bands", cmd_calibrate),
    "truth": ("simulated ground-truth field of a model preset", cmd_truth),
    "render": ("render a field CSV as a PNG heatmap", cmd_render),
    "returns-pipeline": ("prices to bootstrap best match", cmd_returns),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run options")
    g.add_argument("--config", help="key = value configuration file (flags override it)")
    g.add_argument("--input", help="input series or price CSV")
    g.add_argument("--column", help="column index (0-based) or header name")
    g.add_argument("--field", help="field CSV to render")
    g.add_argument("--preset", help="model preset name")
    g.add_argument("--T", type=int, help="series length")
    g.add_argument("--n", type=int, help="window length (even)")
    g.add_argument("--bandwidth", type=float, help="lag-window bandwidth B_n")
    g.add_argument("--kernel", help="parzen or bartlett")
    g.add_argument("--quantiles", help="comma-separated quantile levels")
    g.add_argument("--stride", type=int, help="t0 stride (default grid when omitted)")
    g.add_argument("--M", type=int, help="calibration replications")
    g.add_argument("--R", type=int, help="ground-truth replications")
    g.add_argument("--length", type=int, help="ground-truth path length")
    g.add_argument("--J", type=int, help="number of bootstrap series")
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--bands", help="calibration bands file")
    g.add_argument("--innovations", choices=("uniform", "normal"), help="calibration noise")
    g.add_argument("--variance-halfwidth", type=int, help="local variance half-width")
    g.add_argument("--fixed-divisor", action="store_const", const=True,
                   help="use the unrenormalized local variance at the edges")
    g.add_argument("--no-render", dest="render", action="store_const", const=False,
                   help="skip heatmaps in returns-pipeline")
    g.add_argument("--out", help="output file or directory")

    parser = argparse.ArgumentParser(prog="qspec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (help_, _) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "render":
            p.add_argument("--pair", help="render a single panel 'tau1,tau2,part'")
        if name == "returns-pipeline":
            p.add_argument("--candidate", action="append",
                           help="field CSV used instead of bootstrap fields (repeatable)")
    return parser


_NOT_CONFIG = ("command", "config", "pair", "candidate")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
        cfg = load_config(args.config, overrides)
        func = COMMANDS[args.command][1]
        if args.command == "render":
            result = func(cfg, args.pair)
        elif args.command == "returns-pipeline":
            result = func(cfg, args.candidate)
        else:
            result = func(cfg)
    except (ValueError, ArithmeticError, IndexError, KeyError, OSError) as exc:
        print(f"qspec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
