import logging
import os
from typing import Optional, Sequence

import pandas as pd

from screenmin.analytics.error_power import bonferroni_power, error_power_report
from screenmin.analytics.thresholds import ThresholdSpec, oracle_threshold
from screenmin.config.config_classes import SimulationConfig
from screenmin.const import constants
from screenmin.const.constants import CurveKind, Method, ThresholdKind
from screenmin.data.procedure_result import ProcedureResult
from screenmin.data.pvalue_matrix import PValueMatrix
from screenmin.distributions.screening import PairMixture
from screenmin.processing.output_helpers import companion_path, make_parent_folder, save_dataframe_as_csv
from screenmin.processing.output_helpers import save_key_values
from screenmin.processing.procedures import MethodSpec, run_procedure
from screenmin.processing.simulation import SimulationSummary, run_study
from screenmin.util.curves import fwer_power_vs_c, p0_vs_snr

log = logging.getLogger(__name__)

SUMMARY_SUFFIX = "_summary.txt"
CONFIG_SUFFIX = "_config.yaml"


def run_analysis(input_path: os.PathLike,
                 alpha: float,
                 method_spec: MethodSpec,
                 out_path: Optional[os.PathLike] = None) -> ProcedureResult:
    """
    Applies a procedure to the p-value matrix in a CSV file

    Parameters
    ----------
    input_path : os.PathLike
        CSV file with header id,p1,p2
    alpha : float
        familywise error level
    method_spec : MethodSpec
        procedure and, for ScreenMin, the threshold kind; the oracle threshold is not available for observed data
    out_path : Optional[os.PathLike]
        results CSV; the summary block is written next to it. If None, nothing is saved.

    Returns
    -------
    ProcedureResult
        the procedure's result
    """
    if method_spec.method == Method.SCREENMIN and method_spec.threshold.kind == ThresholdKind.ORACLE:
        error_msg = 'The oracle threshold needs a generative model and cannot be used to analyse observed data.'
        log.error(error_msg)
        raise ValueError(error_msg)
    pmat = PValueMatrix.from_csv(input_path)
    log.info('Running %s at alpha=%s on %s rows', method_spec, alpha, pmat.m)
    result = run_procedure(pmat, alpha, method_spec)
    log.info('%s selected %s rows and rejected %s', method_spec, result.n_selected, result.n_rejected)
    if out_path is not None:
        make_parent_folder(out_path)
        result.save_data_as_csv(out_path)
        save_key_values(result.summary(), companion_path(out_path, SUMMARY_SUFFIX))
    return result


def run_simulation(config: SimulationConfig,
                   out_path: Optional[os.PathLike] = None,
                   workers: int = 1) -> SimulationSummary:
    """
    Runs the Monte Carlo study of a simulation config and saves its summary and the resolved config

    Parameters
    ----------
    config : SimulationConfig
        simulation settings
    out_path : Optional[os.PathLike]
        summary CSV; the resolved config is written next to it. If None, nothing is saved.
    workers : int, optional
        number of worker processes, by default 1

    Returns
    -------
    SimulationSummary
        estimates per grid point and method
    """
    summary = run_study(config, workers=workers)
    if out_path is not None:
        make_parent_folder(out_path)
        summary.save_data_as_csv(out_path)
        config.save_to_yaml(companion_path(out_path, CONFIG_SUFFIX))
    return summary


def run_oracle(alpha: float, mix: PairMixture) -> dict:
    """
    Solves for the oracle threshold and collects the quantities around it

    Parameters
    ----------
    alpha : float
        familywise error level
    mix : PairMixture
        generative model

    Returns
    -------
    dict
        c_star, its status, c_bar and the relative gap |c_star - c_bar| / c_bar, g(c_star), E|S(c_star)|, testing thresholds, exact and approximate error
        and power, and the power of Bonferroni; undefined values are None
    """
    choice = oracle_threshold(alpha, mix)
    report = error_power_report(choice.value, alpha, mix)
    has_false = report.power_approx is not None
    return {
        'alpha': alpha,
        'm': mix.m,
        'pi0': mix.pi0,
        'pi1': mix.pi1,
        'pi2': mix.pi2,
        'snr': mix.law.snr,
        'c_star': choice.value,
        'status': choice.status.value,
        'c_bar': choice.cbar,
        'c_bar_relative_gap': choice.cbar_relative_gap,
        'fwer_approx': choice.constraint_value,
        'fwer_first_order': choice.first_order_constraint,
        'fwer_exact': report.fwer_exact,
        'expected_selected': choice.expected_selected,
        'testing_threshold': choice.testing_threshold,
        'local_linear_testing_threshold': choice.local_linear_testing_threshold,
        'power_approx': report.power_approx,
        'power_exact': report.power_exact,
        'bonferroni_power': bonferroni_power(alpha, mix.m, mix.law) if has_false else None,
    }


def run_curves(kind: CurveKind,
               out_path: Optional[os.PathLike] = None,
               alpha: float = constants.DEFAULT_ALPHA,
               mix: Optional[PairMixture] = None,
               u: float = constants.CURVE_DEFAULT_P0_QUANTILE,
               thresholds: Sequence[float] = constants.CURVE_DEFAULT_P0_THRESHOLDS,
               max_snr: float = constants.CURVE_DEFAULT_MAX_SNR,
               points: int = constants.CURVE_DEFAULT_POINTS,
               min_c: float = constants.CURVE_MIN_THRESHOLD,
               max_c: Optional[float] = None) -> pd.DataFrame:
    """
    Computes the curve data of the requested kind and saves it as CSV

    Parameters
    ----------
    kind : CurveKind
        p0-vs-snr or fwer-power-vs-c
    out_path : Optional[os.PathLike]
        CSV path. If None, nothing is saved.
    alpha, mix, min_c, max_c
        settings of fwer-power-vs-c; mix is required for it
    u, thresholds, max_snr
        settings of p0-vs-snr
    points : int
        number of grid points of either kind

    Returns
    -------
    pd.DataFrame
        the curve data
    """
    if kind == CurveKind.P0_VS_SNR:
        data = p0_vs_snr(u=u, thresholds=thresholds, max_snr=max_snr, points=points)
    else:
        if mix is None:
            error_msg = 'The fwer-power-vs-c curves need a pair mixture (m, pi0, pi1, pi2, snr).'
            log.error(error_msg)
            raise ValueError(error_msg)
        data = fwer_power_vs_c(alpha, mix, points=points, min_c=min_c, max_c=max_c)
    if out_path is not None:
        save_dataframe_as_csv(data, out_path)
    return data


def parse_method(method: str, threshold: Optional[str] = None) -> MethodSpec:
    """Combines the --method and --threshold command line values into a MethodSpec"""
    if threshold is None:
        return MethodSpec.parse(method)
    if Method(method) != Method.SCREENMIN:
        error_msg = f'--threshold only applies to screenmin, got --method {method}.'
        log.error(error_msg)
        raise ValueError(error_msg)
    return MethodSpec(method=Method.SCREENMIN, threshold=ThresholdSpec.parse(threshold))
