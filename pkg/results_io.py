"""
CSV persistence for staircases, solution grids and dispersion tables.

Floats are written with 17 significant digits so repeated runs of the same
configuration produce byte-identical files.
"""
import os
import logging
from typing import Iterable, Optional, Tuple

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def write_table(df: pd.DataFrame, path: str, comment: Optional[str] = None) -> str:
    """Writes one header row (after an optional '# ...' comment line)."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if comment:
            f.write(f"# {comment}\n")
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logging.info(f"Wrote {len(df)} rows to {path}")
    return path


def load_table(path: str) -> pd.DataFrame:
    """Reads a CSV written by write_table, skipping comment lines."""
    return pd.read_csv(path, comment="#")


def staircase_frame(st, samples: int) -> pd.DataFrame:
    """(xi, value) on a uniform grid of ``samples`` points over [0, 1]."""
    xi = np.linspace(0.0, 1.0, samples)
    values = np.asarray(st.evaluate(xi))
    return pd.DataFrame({"xi": xi, "value": values})


def solution_grid_1d(evaluate, times: Iterable[float], xs: np.ndarray) -> pd.DataFrame:
    """Long-format (t, x, U) grid; ``evaluate(t, x)`` must broadcast."""
    t_grid, x_grid = np.meshgrid(np.asarray(list(times), dtype=float), xs, indexing="ij")
    values = np.asarray(evaluate(t_grid, x_grid))
    return pd.DataFrame({"t": t_grid.ravel(), "x": x_grid.ravel(), "U": values.ravel()})


def solution_grid_2d(evaluate, times: Iterable[float], xs: np.ndarray, ys: np.ndarray) -> pd.DataFrame:
    """Long-format (t, x, y, U) grid; ``evaluate(t, x, y)`` must broadcast."""
    t_grid, x_grid, y_grid = np.meshgrid(np.asarray(list(times), dtype=float), xs, ys, indexing="ij")
    values = np.asarray(evaluate(t_grid, x_grid, y_grid))
    return pd.DataFrame(
        {"t": t_grid.ravel(), "x": x_grid.ravel(), "y": y_grid.ravel(), "U": values.ravel()}
    )


def dispersion_frame(table: Iterable[Tuple[float, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(table), columns=["k", "omega"])


def coefficient_frame(coefficients: np.ndarray, frequencies: np.ndarray) -> pd.DataFrame:
    """Modal coefficients with their frequencies; 1D uses column n, 2D uses m and n."""
    coefficients = np.asarray(coefficients)
    if coefficients.ndim == 1:
        return pd.DataFrame(
            {"n": np.arange(1, coefficients.size + 1), "coefficient": coefficients, "omega": frequencies}
        )
    m, n = np.meshgrid(
        np.arange(1, coefficients.shape[0] + 1), np.arange(1, coefficients.shape[1] + 1), indexing="ij"
    )
    return pd.DataFrame(
        {"m": m.ravel(), "n": n.ravel(), "coefficient": coefficients.ravel(), "omega": np.ravel(frequencies)}
    )
