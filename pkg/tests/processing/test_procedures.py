import os

import numpy as np
import pytest

from screenmin.analytics.thresholds import ThresholdSpec
from screenmin.const.constants import Method, ThresholdKind
from screenmin.data.pvalue_matrix import PValueMatrix
from screenmin.processing.procedures import MethodSpec, adaptive_screenmin, bonferroni_max, holm_max
from screenmin.processing.procedures import run_procedure, screenmin


@pytest.fixture
def navy_pvalues(navy_csv_path):
    return PValueMatrix.from_csv(navy_csv_path)


def _from_pmax(pmax):
    pmax = np.asarray(pmax, dtype=float)
    return PValueMatrix(ids=[f"r{i}" for i in range(len(pmax))], p1=pmax / 2, p2=pmax)


def test_screenmin_single_selection():
    pmat = PValueMatrix.from_csv(os.path.join('tests', 'test_data', 'pvalues', 'two_rows.csv'))
    result = screenmin(pmat, 0.05, 0.025)
    np.testing.assert_array_equal(result.selected, [True, False])
    np.testing.assert_allclose(result.adjusted_p, [0.04, 1.0])
    np.testing.assert_array_equal(result.rejected, [True, False])
    assert result.testing_threshold == 0.05


def test_screenmin_adjusting_the_minimum():
    pmat = PValueMatrix(ids=["a", "b"], p1=[0.001, 0.2], p2=[0.04, 0.003])
    result = screenmin(pmat, 0.05, 0.01, adjust_with_minimum=True)
    np.testing.assert_allclose(result.adjusted_p, [0.002, 0.006])
    default = screenmin(pmat, 0.05, 0.01)
    np.testing.assert_allclose(default.adjusted_p, [0.08, 0.4])


def test_screenmin_empty_selection():
    pmat = PValueMatrix(ids=["a", "b"], p1=[1.0, 1.0], p2=[1.0, 1.0])
    result = screenmin(pmat, 0.05, 0.01)
    assert result.n_selected == 0
    np.testing.assert_array_equal(result.adjusted_p, [1.0, 1.0])
    assert result.testing_threshold is None


def test_screenmin_navy_default_threshold(navy_pvalues):
    result = screenmin(navy_pvalues, 0.05, 0.05 / 149)
    assert result.n_selected == 13
    np.testing.assert_array_equal(np.flatnonzero(result.selected), np.arange(13))
    assert result.testing_threshold == pytest.approx(0.05 / 13)
    assert result.n_rejected == 0


def test_screenmin_rejects_invalid_arguments(navy_pvalues):
    with pytest.raises(ValueError):
        screenmin(navy_pvalues, 0.05, 0.0)
    with pytest.raises(ValueError):
        screenmin(navy_pvalues, 1.0, 0.01)


def test_adaptive_screenmin_navy(navy_pvalues):
    result = adaptive_screenmin(navy_pvalues, 0.05)
    assert result.n_selected == 22
    assert 0.05 / 23 <= result.selection_threshold <= 0.05 / 22
    assert result.n_rejected == 0


def test_adaptive_screenmin_single_row():
    pmat = PValueMatrix(ids=["a"], p1=[1e-4], p2=[2e-3])
    result = adaptive_screenmin(pmat, 0.05)
    assert result.selection_threshold == 0.05
    assert result.rejected[0]


def test_adaptive_rejections_are_screenmin_rejections():
    rng = np.random.default_rng(91)
    for _ in range(20):
        pmat = PValueMatrix(ids=np.arange(50).astype(str), p1=rng.random(50) ** 4, p2=rng.random(50) ** 4)
        adaptive = adaptive_screenmin(pmat, 0.05)
        reference = screenmin(pmat, 0.05, adaptive.selection_threshold)
        np.testing.assert_array_equal(adaptive.selected, reference.selected)
        assert np.all(reference.rejected[adaptive.rejected])
        np.testing.assert_array_equal(adaptive.rejected, adaptive.adjusted_p <= 0.05)


def test_bonferroni_max():
    result = bonferroni_max(_from_pmax([0.0001, 0.5, 0.9]), 0.05)
    np.testing.assert_array_equal(result.rejected, [True, False, False])
    single = bonferroni_max(_from_pmax([0.05]), 0.05)
    assert single.rejected[0]
    assert single.selection_threshold is None


def test_bonferroni_and_holm_on_navy(navy_pvalues):
    assert bonferroni_max(navy_pvalues, 0.05).n_rejected == 0
    assert holm_max(navy_pvalues, 0.05).n_rejected == 0


def test_holm_steps_down():
    pmat = _from_pmax([0.01, 0.02, 0.9])
    bonferroni = bonferroni_max(pmat, 0.05)
    holm = holm_max(pmat, 0.05)
    np.testing.assert_allclose(bonferroni.adjusted_p, [0.03, 0.06, 1.0])
    np.testing.assert_allclose(holm.adjusted_p, [0.03, 0.04, 0.9])
    np.testing.assert_array_equal(bonferroni.rejected, [True, False, False])
    np.testing.assert_array_equal(holm.rejected, [True, True, False])


def test_holm_adjusted_values_are_monotone_in_pmax():
    pmat = PValueMatrix.from_csv(os.path.join('tests', 'test_data', 'pvalues', 'holm_example.csv'))
    holm = holm_max(pmat, 0.05)
    order = np.argsort(pmat.pmax)
    assert np.all(np.diff(holm.adjusted_p[order]) >= 0)
    np.testing.assert_allclose(holm.adjusted_p, [0.03, 0.04, 0.9])


def test_holm_single_row_is_bonferroni():
    pmat = _from_pmax([0.03])
    np.testing.assert_array_equal(holm_max(pmat, 0.05).adjusted_p, bonferroni_max(pmat, 0.05).adjusted_p)


def test_boundary_values_are_rejected_by_both():
    pmat = _from_pmax([0.0125] * 4)
    assert bonferroni_max(pmat, 0.05).n_rejected == 4
    assert holm_max(pmat, 0.05).n_rejected == 4


def test_method_spec_parsing():
    assert MethodSpec.parse("screenmin") == MethodSpec(Method.SCREENMIN, ThresholdSpec(ThresholdKind.DEFAULT))
    assert MethodSpec.parse("screenmin:fixed:0.001").threshold.value == 0.001
    assert MethodSpec.parse("holm").threshold is None
    assert MethodSpec.parse("screenmin:oracle").label == "screenmin:oracle"
    with pytest.raises(ValueError):
        MethodSpec.parse("bonferroni:default")
    with pytest.raises(ValueError):
        MethodSpec.parse("sampson")


def test_run_procedure_dispatch(navy_pvalues):
    assert run_procedure(navy_pvalues, 0.05, MethodSpec.parse("screenmin:default")).n_selected == 13
    assert run_procedure(navy_pvalues, 0.05, MethodSpec.parse("screenmin:adaptive")).n_selected == 22
    assert run_procedure(navy_pvalues, 0.05, MethodSpec.parse("adaptive")).n_selected == 22
    assert run_procedure(navy_pvalues, 0.05, MethodSpec.parse("bonferroni")).method == Method.BONFERRONI
    assert run_procedure(navy_pvalues, 0.05, MethodSpec.parse("holm")).method == Method.HOLM
    fixed = run_procedure(navy_pvalues, 0.05, MethodSpec.parse("screenmin"), selection_threshold=1e-5)
    assert fixed.n_selected == 3
    with pytest.raises(ValueError):
        run_procedure(navy_pvalues, 0.05, MethodSpec.parse("screenmin:oracle"))
