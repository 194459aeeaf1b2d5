from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from src.harness.schemas import McReport, RunManifest, Table1Row
from src.sample.io import FLOAT_FORMAT

logger = logging.getLogger(__name__)

TABLE1_COLUMNS = ["tr_target", "cr_target", "n", "coverage", "avg_width", "coverage_mean",
                  "cr_realized", "tr_realized", "a0", "u0", "failures", "status"]


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    return path


def write_manifest(manifest: RunManifest, out_dir: Path, name: str = "manifest.json") -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def write_report(report: McReport, out_dir: Path) -> list[Path]:
    """mn_density.csv, qq.csv, bands.csv and coverage.csv for one campaign."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if report.density_curve is not None:
        density = pd.DataFrame({"mn": report.density_curve.grid, "density": report.density_curve.density})
    else:
        density = pd.DataFrame(columns=["mn", "density"])
    written.append(_write_frame(density, out_dir / "mn_density.csv"))

    qq = pd.DataFrame(report.qq_pairs, columns=["theoretical_q", "empirical_q"])
    written.append(_write_frame(qq, out_dir / "qq.csv"))

    bands = pd.DataFrame(
        {
            "x": report.x_grid,
            "m_true": report.m_true,
            "median_m_hat": report.bands[:, 0],
            "ci_lo": report.bands[:, 1],
            "ci_hi": report.bands[:, 2],
        }
    )
    written.append(_write_frame(bands, out_dir / "bands.csv"))

    coverage = pd.DataFrame(
        {
            "x": report.x_grid,
            "coverage": report.coverage,
            "avg_width": report.avg_width,
            "n_valid": report.n_valid.astype(int),
            "failures": report.failures_per_point.astype(int),
        }
    )
    written.append(_write_frame(coverage, out_dir / "coverage.csv"))

    mn = pd.DataFrame({"replication": np.arange(report.mn_values.size), "mn": report.mn_values})
    written.append(_write_frame(mn, out_dir / "mn_values.csv"))
    logger.info("wrote campaign report to %s", out_dir)
    return written


def write_table1(rows: Sequence[Table1Row], out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=TABLE1_COLUMNS)
    frame = frame.sort_values(["tr_target", "cr_target", "n"], kind="stable")
    return _write_frame(frame, out_dir / "table1.csv")
