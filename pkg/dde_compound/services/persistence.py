"""CSV and JSON writers for run outputs.

Scientific outputs carry no timestamps so repeated runs with the same
configuration and seed produce byte-identical files.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from dde_compound.models.reports import LapReport
from dde_compound.models.spectrum import ComplexSpectrum
from dde_compound.utils.errors import InvalidArgumentError
from dde_compound.utils.logging import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write ``frame`` without index using the fixed float format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("Wrote %s (%d rows)", path, len(frame))
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    msg = f"cannot serialise {type(value).__name__}"
    raise TypeError(msg)


def write_json(payload: dict[str, Any], path: Path) -> Path:
    """Write ``payload`` as indented, key-sorted JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")
    logger.debug("Wrote %s", path)
    return path


def _read_numeric_csv(path: Path, label: str) -> np.ndarray:
    try:
        frame = pd.read_csv(path, header=None, dtype=float)
    except FileNotFoundError as e:
        msg = f"{label} file {path} does not exist"
        raise InvalidArgumentError(msg) from e
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        msg = f"{label} file {path} is not a numeric CSV: {e}"
        raise InvalidArgumentError(msg) from e
    return frame.to_numpy()


def read_matrix_csv(path: Path) -> np.ndarray:
    """Read a header-less numeric CSV as a matrix."""
    return _read_numeric_csv(path, "matrix")


def read_samples_csv(path: Path) -> np.ndarray:
    """Read coefficient samples stored as one header-less column (or one row)."""
    matrix = _read_numeric_csv(path, "sample")
    if min(matrix.shape) != 1:
        msg = f"sample file {path} must hold a single column of values, got shape {matrix.shape}"
        raise InvalidArgumentError(msg)
    return matrix.ravel()


def spectrum_frame(spectrum: ComplexSpectrum) -> pd.DataFrame:
    """Eigenvalue scatter columns ``re,im,mult``."""
    return spectrum.to_frame()


def multiplier_frame(report: LapReport) -> pd.DataFrame:
    """Columns ``k,re,im,mod,lap,bound``; missing laps and bounds are left empty."""
    rows = [
        {
            "k": record.index,
            "re": record.real,
            "im": record.imag,
            "mod": record.modulus,
            "lap": record.lap,
            "bound": record.lower_bound,
        }
        for record in report.records
    ]
    frame = pd.DataFrame(rows, columns=["k", "re", "im", "mod", "lap", "bound"])
    return frame.astype({"lap": "Int64"})


def ratio_field_frame(points: np.ndarray, ratios: np.ndarray) -> pd.DataFrame:
    """Plot data for ratio fields: ``j1..jm,ratio``."""
    points = np.asarray(points, dtype=int)
    data = {f"j{i + 1}": points[:, i] for i in range(points.shape[1])}
    data["ratio"] = np.asarray(ratios, dtype=float)
    return pd.DataFrame(data)
