from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from pydantic import ValidationError

from src.config import RunConfig, Settings, get_settings, load_run_config
from src.errors import (
    AllReplicationsFailed,
    ConfigError,
    EstimationError,
    SampleError,
    SimulationError,
)
from src.harness.campaign import run_campaign
from src.harness.export import write_manifest, write_report, write_table1
from src.harness.normality import MIN_REPLICATIONS, normality_check
from src.harness.schemas import McReport, RunManifest, Table1Row
from src.regression.bandwidth import lscv_bandwidth
from src.regression.export import write_grid_csv
from src.regression.service import RegressionService
from src.sample.io import read_sample_csv, write_sample_csv
from src.simulation.calibration import calibrate_rates
from src.simulation.generator import gen_ltrc_sample
from src.simulation.schemas import SimConfig
from src.survival.estimators import fit_survival
from src.survival.export import export_fit

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INVALID = 2
EXIT_ESTIMATION = 3


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000


def _out_dir(args: argparse.Namespace, settings: Settings) -> Path:
    return args.out if args.out is not None else settings.ltrc_output_root / args.command


def resolve_sim_config(run: RunConfig, n: int | None = None) -> SimConfig:
    """Simulation config of the run, with (a0, u0) calibrated when rate targets are set."""
    template = run.to_sim_config(n=n)
    if run.target_cr is None and run.target_tr is None:
        return template
    if run.target_cr is None or run.target_tr is None:
        raise ConfigError("target_cr and target_tr must be set together")
    a0, u0 = calibrate_rates(run.target_cr, run.target_tr, template)
    return run.to_sim_config(a0=a0, u0=u0, n=n)


def _campaign_manifest(command: str, run: RunConfig, report: McReport, outputs: list[Path], started: float):
    normality = normality_check(report.mn_values) if report.mn_values.size >= MIN_REPLICATIONS else None
    return RunManifest(
        command=command,
        seed=run.seed,
        config=run.as_flat(),
        outputs=[str(path) for path in outputs],
        elapsed_ms=_elapsed_ms(started),
        replication_seeds=list(report.seeds),
        coverage_aggregation="pooled",
        coverage_pooled=report.coverage_pooled,
        coverage_mean=report.coverage_mean,
        failures=report.per_rep_failures,
        normality=normality,
        notes=["table coverage is pooled over (replication, grid point) pairs; coverage_mean averages grid points"],
    )


def cmd_estimate(args: argparse.Namespace, run: RunConfig, settings: Settings) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args, settings)
    sample = read_sample_csv(args.input, delimiter=run.delimiter, header=run.header)
    fit = fit_survival(sample)
    cfg = run.to_estimator_config()
    if run.bandwidth_policy == "lscv":
        cfg = cfg.with_bandwidth(lscv_bandwidth(sample, fit, cfg, run.lscv_grid))
        logger.info("lscv bandwidth: h=%.4f", cfg.bandwidth)

    rows = RegressionService(sample, cfg, fit).estimate_grid(run.x_grid)
    estimates = write_grid_csv(rows, out_dir / "estimates.csv")
    manifest = RunManifest(
        command="estimate",
        seed=run.seed,
        config={**run.as_flat(), "bandwidth": str(cfg.bandwidth), "input": str(args.input)},
        outputs=[str(estimates)],
        elapsed_ms=_elapsed_ms(started),
    )
    write_manifest(manifest, out_dir)

    estimated = sum(row.status == "ok" for row in rows)
    logger.info("estimated %d of %d grid points", estimated, len(rows))
    if not estimated:
        print("error: no grid point could be estimated", file=sys.stderr)
        return EXIT_ESTIMATION
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, run: RunConfig, settings: Settings) -> int:
    started = time.perf_counter()
    path = args.out if args.out is not None else settings.ltrc_output_root / "sample.csv"
    sim = resolve_sim_config(run)
    sample, stats = gen_ltrc_sample(sim)
    write_sample_csv(sample, path, delimiter=run.delimiter)
    sim_path = path.with_suffix(".cfg")
    sim_path.write_text(sim.to_kv_text(), encoding="utf-8")
    manifest = RunManifest(
        command="simulate",
        seed=sim.seed,
        config={**run.as_flat(), "a0": str(sim.a0), "u0": str(sim.u0)},
        outputs=[str(path), str(sim_path)],
        elapsed_ms=_elapsed_ms(started),
        notes=[f"n_drawn={stats.n_drawn} cr={stats.cr_realized:.4f} tr={stats.tr_realized:.4f}"],
    )
    write_manifest(manifest, path.parent, name=f"{path.stem}.manifest.json")
    return EXIT_OK


def cmd_campaign(args: argparse.Namespace, run: RunConfig, settings: Settings) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args, settings)
    sim = resolve_sim_config(run)
    report = run_campaign(run.to_mc_config(sim, threads=settings.ltrc_threads))
    outputs = write_report(report, out_dir)
    write_manifest(_campaign_manifest("campaign", run, report, outputs, started), out_dir)
    return EXIT_OK


def cmd_table1(args: argparse.Namespace, run: RunConfig, settings: Settings) -> int:
    if not run.cells:
        raise ConfigError("table1 needs at least one cell, e.g. cells=20/10/50;20/10/300")
    started = time.perf_counter()
    out_dir = _out_dir(args, settings)
    calibrated: dict[tuple[float, float], tuple[float, float]] = {}
    rows: list[Table1Row] = []
    seeds: list[int] = []
    for cell in run.cells:
        logger.info("table1 cell: TR=%g CR=%g n=%d", cell.tr, cell.cr, cell.n)
        template = run.to_sim_config(n=cell.n)
        try:
            key = (cell.tr, cell.cr)
            if key not in calibrated:
                calibrated[key] = calibrate_rates(cell.cr / 100, cell.tr / 100, template)
            a0, u0 = calibrated[key]
            mc = run.to_mc_config(run.to_sim_config(a0=a0, u0=u0, n=cell.n), threads=settings.ltrc_threads)
            report = run_campaign(mc)
        except (SimulationError, AllReplicationsFailed) as exc:
            logger.warning("table1 cell %s failed: %s", cell.render(), exc)
            a0, u0 = calibrated.get((cell.tr, cell.cr), (float("nan"), float("nan")))
            rows.append(Table1Row(tr_target=cell.tr, cr_target=cell.cr, n=cell.n, a0=a0, u0=u0, status="failed"))
            continue

        write_report(report, out_dir / "cells" / f"tr{cell.tr:g}_cr{cell.cr:g}_n{cell.n}")
        seeds.extend(report.seeds)
        rows.append(
            Table1Row(
                tr_target=cell.tr,
                cr_target=cell.cr,
                n=cell.n,
                a0=a0,
                u0=u0,
                coverage=report.coverage_pooled,
                coverage_mean=report.coverage_mean,
                avg_width=report.mean_width,
                cr_realized=report.cr_realized,
                tr_realized=report.tr_realized,
                failures=int(report.failures_per_point.sum()),
            )
        )

    table = write_table1(rows, out_dir)
    manifest = RunManifest(
        command="table1",
        seed=run.seed,
        config=run.as_flat(),
        outputs=[str(table)],
        elapsed_ms=_elapsed_ms(started),
        replication_seeds=seeds,
        coverage_aggregation="pooled",
        notes=[f"cell {row.tr_target:g}/{row.cr_target:g}/{row.n}: {row.status}" for row in rows],
    )
    write_manifest(manifest, out_dir)
    if any(row.status != "ok" for row in rows):
        print("error: at least one table cell failed entirely", file=sys.stderr)
        return EXIT_ESTIMATION
    return EXIT_OK


def cmd_survival(args: argparse.Namespace, run: RunConfig, settings: Settings) -> int:
    started = time.perf_counter()
    out_dir = _out_dir(args, settings)
    sample = read_sample_csv(args.input, delimiter=run.delimiter, header=run.header)
    fit = fit_survival(sample)
    written = export_fit(fit, out_dir)
    manifest = RunManifest(
        command="survival",
        seed=run.seed,
        config={**run.as_flat(), "input": str(args.input)},
        outputs=[str(path) for path in written],
        elapsed_ms=_elapsed_ms(started),
        notes=[f"mu_n={fit.mu_n!r}"],
    )
    write_manifest(manifest, out_dir)
    return EXIT_OK


COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "campaign": cmd_campaign,
    "table1": cmd_table1,
    "survival": cmd_survival,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltrc",
        description="Robust kernel regression for left-truncated right-censored dependent data.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "estimate": "estimate m(x) with confidence intervals on a data file",
        "simulate": "generate one simulated LTRC sample",
        "campaign": "run one Monte Carlo campaign",
        "table1": "run a campaign per (TR, CR, n) cell and tabulate coverage",
        "survival": "fit the product-limit estimators of a data file",
    }
    for name, help_text in helps.items():
        sub = subparsers.add_parser(name, help=help_text)
        if name in {"estimate", "survival"}:
            sub.add_argument("--input", type=Path, required=True, help="CSV with columns x1..xd, z, t, delta")
        sub.add_argument("--config", type=Path, default=None, help="flat key=value configuration file")
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one configuration key (repeatable)",
        )
        sub.add_argument("--out", type=Path, default=None, help="output directory (file for simulate)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(level=settings.effective_log_level, format=LOG_FORMAT)
    logger.info(
        "effective_settings: threads=%d log_level=%s debug_mode=%s output_root=%s",
        settings.ltrc_threads,
        settings.effective_log_level,
        settings.ltrc_debug_mode,
        settings.ltrc_output_root,
    )

    try:
        run = load_run_config(args.config, args.overrides)
        return COMMANDS[args.command](args, run, settings)
    except (SampleError, ConfigError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (EstimationError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except Exception:
        logger.exception("%s failed", args.command)
        return EXIT_UNEXPECTED


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
