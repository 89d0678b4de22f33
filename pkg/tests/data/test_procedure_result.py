import os

import numpy as np
import pandas as pd
import pytest

from screenmin.const.constants import Method
from screenmin.data.procedure_result import ProcedureResult, format_value
from screenmin.data.pvalue_matrix import PValueMatrix
from screenmin.processing.procedures import screenmin


@pytest.fixture
def result():
    pmat = PValueMatrix(ids=["r1", "r2", "r3"], p1=[0.01, 0.3, 1 / 3], p2=[0.04, 0.6, 0.002])
    return screenmin(pmat, 0.05, 0.025)


def test_format_value():
    assert format_value(None) == "NA"
    assert format_value(np.nan) == "NA"
    assert format_value(True) == "True"
    assert format_value(np.int64(13)) == "13"
    assert format_value(0.05) == "5.0000000000000003e-02"
    assert format_value("screenmin") == "screenmin"


def test_summary(result):
    summary = result.summary()
    assert summary["method"] == "screenmin"
    assert summary["m"] == 3
    assert summary["selected"] == 2
    assert summary["testing_threshold"] == pytest.approx(0.025)
    assert "selected: 2\n" in result.summary_text()


def test_csv_round_trip(result, tmp_path):
    out_path = os.path.join(tmp_path, "results.csv")
    result.save_data_as_csv(out_path)
    rows = ProcedureResult.read_rows_from_csv(out_path)
    np.testing.assert_array_equal(rows["id"].to_numpy(), result.ids)
    for column in ("p1", "p2", "pmin", "pmax", "adjusted_p"):
        np.testing.assert_array_equal(rows[column].to_numpy(), getattr(result, column))
    np.testing.assert_array_equal(rows["selected"].to_numpy(), result.selected)
    np.testing.assert_array_equal(rows["rejected"].to_numpy(), result.rejected)
    with open(out_path, "rb") as fh:
        content = fh.read()
    assert b"\r" not in content
    assert content.startswith(b"id,p1,p2,pmin,pmax,selected,adjusted_p,rejected\n")


def test_read_rows_rejects_other_files(tmp_path):
    out_path = os.path.join(tmp_path, "other.csv")
    pd.DataFrame({"a": [1]}).to_csv(out_path, index=False)
    with pytest.raises(ValueError):
        ProcedureResult.read_rows_from_csv(out_path)


def test_counts():
    result = ProcedureResult(ids=np.array(["a", "b"]), p1=np.array([0.1, 0.2]), p2=np.array([0.3, 0.4]),
                             selected=np.array([True, False]), adjusted_p=np.array([0.6, 1.0]),
                             rejected=np.array([False, False]), method=Method.SCREENMIN, alpha=0.05)
    assert result.n_selected == 1
    assert result.n_rejected == 0
    assert result.summary()["selection_threshold"] is None
