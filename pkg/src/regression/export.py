from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from src.regression.schemas import GridRow
from src.sample.io import FLOAT_FORMAT

GRID_COLUMNS = ["x", "m_hat", "sigma_hat", "ci_lo", "ci_hi", "n_effective", "status"]


def write_grid_csv(rows: Sequence[GridRow], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=GRID_COLUMNS)
    frame["n_effective"] = frame["n_effective"].astype("Int64")
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    return path
