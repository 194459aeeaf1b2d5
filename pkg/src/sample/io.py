from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import EmptySample, InvalidRecord
from src.sample.schemas import LtrcSample

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _looks_like_header(first_row: list[str]) -> bool:
    try:
        [float(cell) for cell in first_row]
    except (TypeError, ValueError):
        return True
    return False


def read_sample_csv(path: Path, delimiter: str = ",", header: bool | None = None) -> LtrcSample:
    """Read columns x1..xd, z, t, delta; `header=None` sniffs the first line."""
    frame = pd.read_csv(
        path,
        sep=delimiter,
        header=None,
        dtype=str,
        skip_blank_lines=True,
        keep_default_na=False,
    )
    if header is None:
        header = not frame.empty and _looks_like_header(frame.iloc[0].tolist())
    if header:
        frame = frame.iloc[1:]
    if frame.empty:
        raise EmptySample()
    if frame.shape[1] < 4:
        raise InvalidRecord(0, f"expected at least 4 columns (x, z, t, delta), found {frame.shape[1]}")

    values = np.empty(frame.shape, dtype=float)
    for row_no, row in enumerate(frame.itertuples(index=False)):
        try:
            values[row_no] = [float(cell) for cell in row]
        except ValueError as exc:
            raise InvalidRecord(row_no, f"unparseable value ({exc})") from exc

    sample = LtrcSample.from_arrays(
        x=values[:, :-3],
        z=values[:, -3],
        t=values[:, -2],
        delta=values[:, -1],
    )
    logger.info(
        "loaded sample: path=%s n=%d d=%d censored=%.3f", path, sample.n, sample.dim, sample.censored_fraction
    )
    return sample


def sample_frame(sample: LtrcSample) -> pd.DataFrame:
    columns = {f"x{j + 1}": sample.x[:, j] for j in range(sample.dim)}
    columns.update(z=sample.z, t=sample.t, delta=sample.delta.astype(int))
    return pd.DataFrame(columns)


def write_sample_csv(sample: LtrcSample, path: Path, delimiter: str = ",") -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    sample_frame(sample).to_csv(
        path,
        sep=delimiter,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )
    return path
