import logging
import os

import pandas as pd

from screenmin.const.constants import CSV_FLOAT_FORMAT, CSV_NA_REP
from screenmin.data.procedure_result import format_value

log = logging.getLogger(__name__)


def companion_path(out_path: os.PathLike, suffix: str) -> str:
    """
    Path of a file written next to out_path, e.g. results.csv -> results_summary.txt for suffix '_summary.txt'
    """
    stem, _ = os.path.splitext(str(out_path))
    return f"{stem}{suffix}"


def make_parent_folder(out_path: os.PathLike):
    parent = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(parent, exist_ok=True)


def save_dataframe_as_csv(data: pd.DataFrame, out_path: os.PathLike):
    make_parent_folder(out_path)
    data.to_csv(out_path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=CSV_NA_REP, lineterminator="\n",
                encoding="utf-8")
    log.info('Saved %s rows to %s', len(data), out_path)


def format_key_values(values: dict) -> str:
    return "".join(f"{key}: {format_value(value)}\n" for key, value in values.items())


def save_key_values(values: dict, out_path: os.PathLike):
    make_parent_folder(out_path)
    with open(out_path, 'w', encoding='utf-8', newline="\n") as outfile:
        outfile.write(format_key_values(values))
    log.info('Saved summary to %s', out_path)
