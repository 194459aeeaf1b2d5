from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from src.sample.io import FLOAT_FORMAT
from src.sample.step import StepFunction
from src.survival.schemas import CurveMetadata, SurvivalFit

logger = logging.getLogger(__name__)


def write_curve(curve: StepFunction, fit: SurvivalFit, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{curve.name}.csv"
    pd.DataFrame({"y": curve.jump_points, "value": curve.values}).to_csv(
        csv_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8"
    )
    metadata = CurveMetadata(
        estimator=curve.name,
        n=fit.n,
        mu_n=fit.mu_n,
        value_before_first=curve.value_before_first,
        jump_count=int(curve.jump_points.size),
    )
    (out_dir / f"{curve.name}.json").write_text(metadata.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return csv_path


def export_fit(fit: SurvivalFit, out_dir: Path) -> list[Path]:
    written = [write_curve(curve, fit, out_dir) for curve in fit.curves().values()]
    logger.info("exported %d survival curves to %s (mu_n=%.6f)", len(written), out_dir, fit.mu_n)
    return written
