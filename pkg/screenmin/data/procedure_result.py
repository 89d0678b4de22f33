from __future__ import annotations

from dataclasses import dataclass
import logging
import os
from typing import Optional

import numpy as np
import pandas as pd

from screenmin.const.constants import CSV_FLOAT_FORMAT, CSV_NA_REP, CSV_RESULT_COLUMNS, Method

log = logging.getLogger(__name__)


def format_value(value) -> str:
    """Formats a summary value the way numbers are written to CSV; None becomes the undefined marker"""
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return CSV_NA_REP
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return CSV_FLOAT_FORMAT % value
    return str(value)


@dataclass
class ProcedureResult():
    """Outcome of a multiple testing procedure applied to a p-value matrix.
    Per row: the selection flag, the adjusted p-value and the rejection flag, with rejected <=> adjusted_p <= alpha.
    One-stage procedures select every row and report no selection threshold.
    """
    ids: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    selected: np.ndarray
    adjusted_p: np.ndarray
    rejected: np.ndarray
    method: Method
    alpha: float
    selection_threshold: Optional[float] = None
    testing_threshold: Optional[float] = None  # None when nothing is selected

    @property
    def pmin(self) -> np.ndarray:
        return np.minimum(self.p1, self.p2)

    @property
    def pmax(self) -> np.ndarray:
        return np.maximum(self.p1, self.p2)

    @property
    def n_selected(self) -> int:
        return int(np.sum(self.selected))

    @property
    def n_rejected(self) -> int:
        return int(np.sum(self.rejected))

    def as_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({
            'id': self.ids,
            'p1': self.p1,
            'p2': self.p2,
            'pmin': self.pmin,
            'pmax': self.pmax,
            'selected': np.asarray(self.selected, dtype=bool),
            'adjusted_p': self.adjusted_p,
            'rejected': np.asarray(self.rejected, dtype=bool),
        })

    def summary(self) -> dict:
        return {
            'method': self.method.value,
            'alpha': self.alpha,
            'm': len(self.ids),
            'selection_threshold': self.selection_threshold,
            'testing_threshold': self.testing_threshold,
            'selected': self.n_selected,
            'rejections': self.n_rejected,
        }

    def summary_text(self) -> str:
        return "".join(f"{key}: {format_value(value)}\n" for key, value in self.summary().items())

    def save_data_as_csv(self, out_path: os.PathLike):
        self.as_dataframe().to_csv(out_path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=CSV_NA_REP,
                                   lineterminator="\n", encoding="utf-8")
        log.info('Saved %s procedure results to %s', self.method.value, out_path)

    @staticmethod
    def read_rows_from_csv(csv_path: os.PathLike) -> pd.DataFrame:
        """
        Reads the per-row columns written by save_data_as_csv

        Parameters
        ----------
        csv_path : os.PathLike
            path of a results CSV

        Returns
        -------
        pd.DataFrame
            the rows with columns id, p1, p2, pmin, pmax, selected, adjusted_p, rejected
        """
        data = pd.read_csv(csv_path, dtype={'id': str}, keep_default_na=False, float_precision='round_trip')
        if tuple(data.columns) != CSV_RESULT_COLUMNS:
            error_msg = f'{csv_path} is not a results file, columns are {list(data.columns)}.'
            log.error(error_msg)
            raise ValueError(error_msg)
        for column in ('selected', 'rejected'):
            data[column] = data[column].astype(str) == 'True'
        return data
