from __future__ import annotations

from dataclasses import dataclass
import logging
import os

import numpy as np
import pandas as pd

from screenmin.const.constants import CSV_INPUT_COLUMNS

log = logging.getLogger(__name__)


@dataclass
class PValueMatrix():
    """Class wrapping the m x 2 matrix of component p-values.
    Row i holds p_i1, the p-value for the association of variable i with the exposure, and p_i2,
    the p-value for its association with the outcome. The union hypothesis of row i is tested with
    max(p_i1, p_i2) and screened with min(p_i1, p_i2).
    """
    ids: np.ndarray  # unique row labels
    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        self.ids = np.asarray(self.ids).astype(str)
        self.p1 = np.asarray(self.p1, dtype=float)
        self.p2 = np.asarray(self.p2, dtype=float)
        if not (self.ids.ndim == self.p1.ndim == self.p2.ndim == 1):
            self._raise('ids, p1 and p2 must be one-dimensional.')
        if not (len(self.ids) == len(self.p1) == len(self.p2)):
            self._raise(f'ids, p1 and p2 must have the same length, got {len(self.ids)}, {len(self.p1)} and '
                        f'{len(self.p2)}.')
        if len(self.ids) == 0:
            self._raise('A p-value matrix needs at least one row.')
        for name, values in (("p1", self.p1), ("p2", self.p2)):
            outside = np.flatnonzero(~((values >= 0) & (values <= 1)))
            if outside.size > 0:
                self._raise(f'{name} values must lie in [0, 1]; row {self.ids[outside[0]]} has {name}='
                            f'{values[outside[0]]}.')
        unique_ids, id_counts = np.unique(self.ids, return_counts=True)
        if unique_ids.size != self.ids.size:
            self._raise(f'Row ids must be unique, duplicated: {unique_ids[id_counts > 1].tolist()}.')

    @staticmethod
    def _raise(error_msg: str):
        log.error(error_msg)
        raise ValueError(error_msg)

    @property
    def m(self) -> int:
        return len(self.ids)

    @property
    def pmin(self) -> np.ndarray:
        return np.minimum(self.p1, self.p2)

    @property
    def pmax(self) -> np.ndarray:
        return np.maximum(self.p1, self.p2)

    def __len__(self) -> int:
        return self.m

    def as_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({'id': self.ids, 'p1': self.p1, 'p2': self.p2})

    def permuted(self, order: np.ndarray) -> PValueMatrix:
        return PValueMatrix(ids=self.ids[order], p1=self.p1[order], p2=self.p2[order])

    @staticmethod
    def from_csv(csv_path: os.PathLike) -> PValueMatrix:
        """
        Reads a p-value matrix from a CSV file with header id,p1,p2

        Parameters
        ----------
        csv_path : os.PathLike
            path to the CSV file

        Returns
        -------
        PValueMatrix
            the p-value matrix

        Raises
        ------
        ValueError
            if the file is empty, the header is wrong or a row cannot be read; messages carry the file line number
        """
        try:
            data = pd.read_csv(csv_path, dtype=str, keep_default_na=False, skip_blank_lines=False)
        except pd.errors.EmptyDataError:
            error_msg = f'The p-value file {csv_path} is empty.'
            log.error(error_msg)
            raise ValueError(error_msg) from None
        except pd.errors.ParserError as parser_error:
            error_msg = f'The p-value file {csv_path} is malformed: {parser_error}'
            log.error(error_msg)
            raise ValueError(error_msg) from None

        if tuple(column.strip() for column in data.columns) != CSV_INPUT_COLUMNS:
            error_msg = (f'The p-value file {csv_path} must have the header {",".join(CSV_INPUT_COLUMNS)}, '
                         f'got {",".join(data.columns)}.')
            log.error(error_msg)
            raise ValueError(error_msg)
        data.columns = list(CSV_INPUT_COLUMNS)
        data = data.fillna("")

        # the header is line 1 of the file; blank lines keep their place in the numbering and are dropped after
        line_numbers = np.arange(len(data)) + 2
        blank = (data.apply(lambda column: column.str.strip()) == "").all(axis=1).to_numpy()
        data = data.loc[~blank].reset_index(drop=True)
        line_numbers = line_numbers[~blank]
        if len(data) == 0:
            error_msg = f'The p-value file {csv_path} contains no data rows.'
            log.error(error_msg)
            raise ValueError(error_msg)
        values = {}
        for column in ("p1", "p2"):
            parsed = pd.to_numeric(data[column].str.strip(), errors="coerce").to_numpy(dtype=float)
            bad_rows = np.flatnonzero(~np.isfinite(parsed))
            if bad_rows.size > 0:
                error_msg = (f'Could not read {column} on line {line_numbers[bad_rows[0]]} of {csv_path}: '
                             f'"{data[column].iloc[bad_rows[0]]}".')
                log.error(error_msg)
                raise ValueError(error_msg)
            outside = np.flatnonzero((parsed < 0) | (parsed > 1))
            if outside.size > 0:
                error_msg = (f'{column} on line {line_numbers[outside[0]]} of {csv_path} is outside [0, 1]: '
                             f'{parsed[outside[0]]}.')
                log.error(error_msg)
                raise ValueError(error_msg)
            values[column] = parsed

        ids = data["id"].str.strip().to_numpy()
        empty_ids = np.flatnonzero(ids == "")
        if empty_ids.size > 0:
            error_msg = f'Missing id on line {line_numbers[empty_ids[0]]} of {csv_path}.'
            log.error(error_msg)
            raise ValueError(error_msg)
        log.info('Read %s rows of p-values from %s', len(ids), csv_path)
        return PValueMatrix(ids=ids, p1=values["p1"], p2=values["p2"])
