"""
Plot-ready curve data: the conditional law P0 against the signal to noise ratio for a few selection thresholds,
and the familywise error rate and power of ScreenMin as functions of the selection threshold.
"""
import logging
from typing import Sequence

import numpy as np
import pandas as pd

from screenmin.analytics.error_power import approximate_power_curve, bonferroni_power, fwer_approx
from screenmin.analytics.error_power import fwer_exact, fwer_first_order
from screenmin.const import constants
from screenmin.distributions.alternative_law import AlternativeLaw
from screenmin.distributions.screening import PairMixture, p0

log = logging.getLogger(__name__)


def p0_column_name(c: float) -> str:
    return f"p0_c_{c:g}"


def p0_vs_snr(u: float = constants.CURVE_DEFAULT_P0_QUANTILE,
              thresholds: Sequence[float] = constants.CURVE_DEFAULT_P0_THRESHOLDS,
              max_snr: float = constants.CURVE_DEFAULT_MAX_SNR,
              points: int = constants.CURVE_DEFAULT_POINTS) -> pd.DataFrame:
    """
    P0(u, c) for a one-false pair as a function of the signal to noise ratio, one column per threshold c.
    Values above u mean the selected true hypotheses are stochastically smaller than uniform.

    Parameters
    ----------
    u : float, optional
        level at which P0 is evaluated, by default 0.05
    thresholds : Sequence[float], optional
        selection thresholds, one curve each
    max_snr : float, optional
        largest signal to noise ratio, the grid starts at 0
    points : int, optional
        number of grid points

    Returns
    -------
    pd.DataFrame
        column snr followed by one p0_c_<c> column per threshold
    """
    if points < 2 or max_snr <= 0:
        raise ValueError(f'Need at least 2 points and a positive maximum snr, got points={points}, '
                         f'max_snr={max_snr}.')
    for c in thresholds:
        if not 0 < c < 1:
            raise ValueError(f'Selection thresholds must lie in (0, 1), got {c}.')
    snrs = np.linspace(0.0, max_snr, points)
    data = {"snr": snrs}
    for c in thresholds:
        data[p0_column_name(c)] = np.array([p0(u, c, AlternativeLaw(snr=snr)) for snr in snrs])
    log.debug('Computed p0 curves for thresholds %s over snr in [0, %s]', list(thresholds), max_snr)
    return pd.DataFrame(data)


def fwer_power_vs_c(alpha: float,
                    mix: PairMixture,
                    points: int = constants.CURVE_DEFAULT_POINTS,
                    min_c: float = constants.CURVE_MIN_THRESHOLD,
                    max_c: float = None) -> pd.DataFrame:
    """
    Familywise error rate and power of ScreenMin over a log-spaced grid of selection thresholds.
    The exact bound is left undefined (NaN) above the exact pmf size limit, the power columns when the
    mixture has no false union hypotheses.

    Parameters
    ----------
    alpha : float
        familywise error level
    mix : PairMixture
        generative model
    points : int, optional
        number of grid points
    min_c : float, optional
        smallest selection threshold
    max_c : float, optional
        largest selection threshold, alpha when not given

    Returns
    -------
    pd.DataFrame
        columns c, fwer_approx, fwer_first_order, fwer_exact, power_approx, bonferroni_power
    """
    max_c = alpha if max_c is None else max_c
    if points < 2 or not 0 < min_c < max_c < 1:
        raise ValueError(f'Need at least 2 points and 0 < min_c < max_c < 1, got points={points}, '
                         f'min_c={min_c}, max_c={max_c}.')
    grid = np.geomspace(min_c, max_c, points)
    has_false = mix.type_counts()[2] > 0 and mix.pi2 > 0
    if mix.m <= constants.EXACT_PMF_MAX_M:
        exact = np.array([fwer_exact(c, alpha, mix) for c in grid])
    else:
        log.info('m=%s is above the exact pmf limit, the fwer_exact column is left undefined', mix.m)
        exact = np.full(points, np.nan)
    if has_false:
        power = np.asarray(approximate_power_curve(grid, alpha, mix), dtype=float)
        bonferroni = np.full(points, bonferroni_power(alpha, mix.m, mix.law))
    else:
        log.warning('No false union hypotheses in the mixture, power columns are left undefined.')
        power = np.full(points, np.nan)
        bonferroni = np.full(points, np.nan)
    return pd.DataFrame({
        "c": grid,
        "fwer_approx": np.asarray(fwer_approx(grid, alpha, mix), dtype=float),
        "fwer_first_order": np.asarray(fwer_first_order(grid, alpha, mix), dtype=float),
        "fwer_exact": exact,
        "power_approx": power,
        "bonferroni_power": bonferroni,
    })
