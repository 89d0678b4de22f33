import os

import numpy as np
import pytest
from scipy.special import ndtri
from scipy.stats import kstest

from screenmin.analytics.error_power import fwer_exact
from screenmin.config.config_classes import SimulationConfig
from screenmin.processing.simulation import generate_pvalues, run_study

CONFIG_DIR = os.path.join('tests', 'test_data', 'configs')


def _config(**overrides) -> SimulationConfig:
    params = dict(m=40, pi0=0.7, pi1=0.25, pi2=0.05, snr1=3.0, snr2=3.0, rho=0.0, alpha=0.05,
                  replications=30, seed=2024, methods=["screenmin:default", "adaptive", "bonferroni", "holm"])
    params.update(overrides)
    return SimulationConfig.from_params(**params)


def test_generate_pvalues_layout():
    dataset = generate_pvalues(_config(m=200, pi0=0.75, pi1=0.2, pi2=0.05), 0)
    assert dataset.pvalues.m == 200
    assert dataset.union_false.sum() == 10
    assert np.all(dataset.union_false[:10])
    assert dataset.false1.sum() == 10 + 20
    assert dataset.false2.sum() == 10 + 20
    types, counts = np.unique(dataset.pair_types, return_counts=True)
    assert dict(zip(types, counts)) == {"00": 150, "01": 40, "11": 10}


def test_generate_pvalues_is_deterministic():
    config = _config()
    first = generate_pvalues(config, 3)
    second = generate_pvalues(config, 3)
    np.testing.assert_array_equal(first.pvalues.p1, second.pvalues.p1)
    np.testing.assert_array_equal(first.pvalues.p2, second.pvalues.p2)
    other = generate_pvalues(config, 4)
    assert not np.array_equal(first.pvalues.p1, other.pvalues.p1)
    assert not np.array_equal(first.pvalues.p1, first.pvalues.p2)


def test_generate_pvalues_null_is_uniform():
    config = _config(m=1000, pi0=1.0, pi1=0.0, pi2=0.0, snr1=0.0, snr2=0.0)
    pooled = np.concatenate([generate_pvalues(config, i).pvalues.p1 for i in range(100)])
    assert kstest(pooled, "uniform").pvalue > 0.001


def test_generate_pvalues_within_column_correlation():
    config = _config(m=50, pi0=1.0, pi1=0.0, pi2=0.0, rho=0.8)
    statistics = np.stack([-ndtri(generate_pvalues(config, i).pvalues.p1) for i in range(2000)])
    correlation = np.corrcoef(statistics, rowvar=False)
    off_diagonal = correlation[~np.eye(50, dtype=bool)]
    assert off_diagonal.mean() == pytest.approx(0.8, abs=0.02)


def test_generate_pvalues_columns_are_independent():
    config = _config(m=50, pi0=1.0, pi1=0.0, pi2=0.0, rho=0.8)
    first_rows = np.array([generate_pvalues(config, i).pvalues.p1[0] for i in range(2000)])
    second_rows = np.array([generate_pvalues(config, i).pvalues.p2[0] for i in range(2000)])
    assert abs(np.corrcoef(first_rows, second_rows)[0, 1]) < 0.1


def test_run_study_rows_and_ranges():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config.yaml'))
    summary = run_study(config)
    data = summary.as_dataframe()
    assert len(data) == len(config.methods)
    assert list(data["method"]) == [method.label for method in config.methods]
    assert np.all((data["fwer"] >= 0) & (data["fwer"] <= 1))
    assert np.all((data["power"] >= 0) & (data["power"] <= 1))
    assert np.all(data["fwer_se"] >= 0)
    assert summary.get_row("screenmin:oracle").selection_threshold is not None
    assert summary.get_row("bonferroni").selection_threshold is None


def test_run_study_grid():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config_grid.yaml'))
    data = run_study(config).as_dataframe()
    assert len(data) == 3 * 3
    np.testing.assert_allclose(data["pi1"].unique(), [0.0, 0.1, 0.2])


def test_run_study_is_reproducible_across_workers():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config.yaml'))
    serial = run_study(config, workers=1).as_dataframe()
    again = run_study(config, workers=1).as_dataframe()
    parallel = run_study(config, workers=2).as_dataframe()
    assert serial.equals(again)
    assert serial.equals(parallel)


def test_run_study_without_false_union_hypotheses_reports_undefined_power():
    summary = run_study(_config(pi0=0.5, pi1=0.5, pi2=0.0))
    assert np.all(np.isnan(summary.as_dataframe()["power"]))


def test_run_study_single_replication_has_undefined_power_se():
    data = run_study(_config(replications=1)).as_dataframe()
    assert np.all(np.isnan(data["power_se"]))


def test_run_study_bonferroni_controls_global_null():
    config = _config(m=100, pi0=1.0, pi1=0.0, pi2=0.0, replications=2000, methods=["bonferroni"])
    row = run_study(config).get_row("bonferroni")
    assert row.fwer <= 0.05 + 3 * np.sqrt(0.05 * 0.95 / 2000)


def test_run_study_matches_exact_error_rate_for_one_false_pairs():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config.json'))
    row = run_study(config).get_row("screenmin:fixed:0.005")
    expected = fwer_exact(0.005, 0.05, config.pair_mixture())
    standard_error = np.sqrt(expected * (1 - expected) / config.replications)
    assert abs(row.fwer - expected) < 4 * standard_error


def test_run_study_rejects_invalid_workers():
    with pytest.raises(ValueError):
        run_study(_config(), workers=0)


SWEEP_PI1 = [0.0, 0.1, 0.2, 0.3, 0.4]
SCREENMIN_VARIANTS = ["screenmin:oracle", "adaptive", "screenmin:default"]


@pytest.fixture(scope="module")
def pi1_sweep_independent():
    config = SimulationConfig.from_yaml(os.path.join('configuration', 'pi1_sweep_m200_snr3.yaml'))
    return config, run_study(config, workers=2)


@pytest.fixture(scope="module")
def pi1_sweep_dependent():
    config = SimulationConfig.from_yaml(os.path.join('configuration', 'dependence_rho08.yaml'))
    return config, run_study(config, workers=2)


def test_pi1_sweep_controls_error_rate(pi1_sweep_independent, pi1_sweep_dependent):
    for config, summary in (pi1_sweep_independent, pi1_sweep_dependent):
        bound = config.alpha + 3 * np.sqrt(config.alpha * (1 - config.alpha) / config.replications)
        data = summary.as_dataframe()
        assert len(data) == len(SWEEP_PI1) * len(config.methods)
        assert np.all(data["fwer"] <= bound)


def test_pi1_sweep_power_ordering(pi1_sweep_independent):
    _, summary = pi1_sweep_independent
    tolerance = 3 * 1.6e-2
    for pi1 in SWEEP_PI1:
        default = summary.get_row("screenmin:default", pi1).power
        assert default >= summary.get_row("bonferroni", pi1).power - tolerance
        assert summary.get_row("screenmin:oracle", pi1).power >= default - tolerance
        assert summary.get_row("adaptive", pi1).power >= default - tolerance


def test_pi1_sweep_power_does_not_grow_with_pi1(pi1_sweep_independent):
    _, summary = pi1_sweep_independent
    for method in SCREENMIN_VARIANTS:
        rows = [summary.get_row(method, pi1) for pi1 in SWEEP_PI1]
        for smaller, larger in zip(rows[:-1], rows[1:]):
            assert larger.power <= smaller.power + 3 * np.hypot(smaller.power_se, larger.power_se)


def test_pi1_sweep_dependence_is_not_less_conservative(pi1_sweep_independent, pi1_sweep_dependent):
    independent_config, independent = pi1_sweep_independent
    dependent_config, dependent = pi1_sweep_dependent
    assert dependent_config.rho == 0.8 and independent_config.rho == 0
    # averaged over the sweep, with the standard error of the difference at the nominal level
    draws = len(SWEEP_PI1) * independent_config.replications
    tolerance = 3 * np.sqrt(2 * 0.05 * 0.95 / draws)
    for method in [spec.label for spec in independent_config.methods]:
        with_rho = np.mean([dependent.get_row(method, pi1).fwer for pi1 in SWEEP_PI1])
        without_rho = np.mean([independent.get_row(method, pi1).fwer for pi1 in SWEEP_PI1])
        assert with_rho <= without_rho + tolerance
