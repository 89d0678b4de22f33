"""
Finite sample familywise error rate and power of the two-stage ScreenMin procedure with selection threshold c.

Exact quantities take the expectation over the exact law of the selected set size; approximate quantities
replace |S| by its expectation E|S(c)|.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Optional

import numpy as np

from screenmin.const.constants import EXACT_PMF_MAX_M, PMF_TAIL_TOLERANCE
from screenmin.distributions.alternative_law import AlternativeLaw, ArrayLike, alt_cdf, as_output
from screenmin.distributions.screening import PairMixture, expected_selected, p0, p0_complement
from screenmin.distributions.screening import selected_count_pmf, selected_count_pmf_from_counts

log = logging.getLogger(__name__)


@dataclass
class ErrorPowerReport():
    """Familywise error rate and power of ScreenMin at one selection threshold.
    Exact values are None when they are not available for the mixture.
    """
    c: float
    alpha: float
    fwer_exact: Optional[float]
    fwer_approx: float
    power_exact: Optional[float]
    power_approx: Optional[float]


def _check_has_false_hypotheses(mix: PairMixture):
    if mix.type_counts()[2] == 0 or mix.pi2 == 0:
        error_msg = ('Power is undefined for a mixture without false union hypotheses '
                     f'(pi2={mix.pi2}, m={mix.m}).')
        log.error(error_msg)
        raise ValueError(error_msg)


def _one_minus_power(complement: ArrayLike, exponent: ArrayLike) -> ArrayLike:
    """1 - complement^exponent from the complement itself, accurate when the complement is close to one"""
    complement = np.clip(np.asarray(complement, dtype=float), 0.0, 1.0)
    exponent = np.asarray(exponent, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        result = -np.expm1(exponent * np.log(complement))
    # exponent zero with complement zero is 0 * -inf, which is no draw at all
    result = np.where(exponent == 0, 0.0, result)
    return as_output(np.clip(result, 0.0, 1.0))


def fwer_exact(c: float, alpha: float, mix: PairMixture) -> float:
    """
    Right-hand side of the finite sample familywise error bound,
    E([1 - {1 - P0(alpha/|S|, c)}^|S|] I[|S| > 0]), evaluated exactly over the law of |S|.
    It equals the familywise error rate when all pairs are one-false, and bounds it otherwise.

    Parameters
    ----------
    c : float
        selection threshold in (0, 1)
    alpha : float
        familywise error level in (0, 1)
    mix : PairMixture
        generative model

    Returns
    -------
    float
        the bound; 0 when the mixture contains no true union hypotheses
    """
    n0, n1, _ = mix.type_counts()
    if n0 + n1 == 0:
        log.debug('No true union hypotheses in the mixture, the familywise error rate is 0.')
        return 0.0
    pmf = selected_count_pmf(c, mix)
    # drop the upper tail once the accumulated mass is within tolerance of one
    cumulative = np.cumsum(pmf)
    last = min(int(np.searchsorted(cumulative, 1.0 - PMF_TAIL_TOLERANCE)) + 1, len(pmf))
    log.debug('Evaluating the familywise error bound over |S| = 1..%s of %s', last - 1, mix.m)
    sizes = np.arange(1, last)
    if sizes.size == 0:
        return 0.0
    conditional = _one_minus_power(p0_complement(alpha / sizes, c, mix.law), sizes)
    return float(np.sum(pmf[1:last] * conditional))


def fwer_approx(c: ArrayLike, alpha: float, mix: PairMixture) -> ArrayLike:
    """
    Approximate familywise error rate g(c) = 1 - {1 - P0(alpha / E|S(c)|, c)}^E|S(c)|, with a real-valued exponent.

    Parameters
    ----------
    c : ArrayLike
        selection threshold(s) in (0, 1)
    alpha : float
        familywise error level
    mix : PairMixture
        generative model

    Returns
    -------
    ArrayLike
        g(c); 0 where E|S(c)| = 0
    """
    expected = np.asarray(expected_selected(c, mix), dtype=float)
    with np.errstate(divide="ignore"):
        testing_threshold = np.where(expected > 0, alpha / np.where(expected > 0, expected, 1.0), 1.0)
    complement = p0_complement(np.minimum(testing_threshold, 1.0), c, mix.law)
    g = np.asarray(_one_minus_power(complement, expected), dtype=float)
    # every selected hypothesis is rejected once the testing threshold reaches one
    return as_output(np.where((expected > 0) & (testing_threshold >= 1.0), 1.0, g))


def fwer_first_order(c: ArrayLike, alpha: float, mix: PairMixture) -> ArrayLike:
    """First order approximation E|S(c)| P0(alpha / E|S(c)|, c) of g(c)"""
    expected = np.asarray(expected_selected(c, mix), dtype=float)
    testing_threshold = alpha / np.where(expected > 0, expected, 1.0)
    first_order = expected * np.asarray(p0(np.minimum(testing_threshold, 1.0), c, mix.law))
    return as_output(np.where(expected > 0, first_order, 0.0))


def conditional_power(s: ArrayLike, c: float, alpha: float, law: AlternativeLaw) -> ArrayLike:
    """
    Probability of rejecting a false union hypothesis given the selected set size |S| = s:
    2 F(c) F(alpha/s) - F(c)^2 when c s <= alpha, F(alpha/s)^2 otherwise, and 0 for s = 0.

    Parameters
    ----------
    s : ArrayLike
        selected set size(s), nonnegative integers
    c : float
        selection threshold
    alpha : float
        familywise error level
    law : AlternativeLaw
        distribution of the non-null p-values

    Returns
    -------
    ArrayLike
        conditional power
    """
    s = np.asarray(s, dtype=float)
    positive = s > 0
    safe_s = np.where(positive, s, 1.0)
    testing_threshold = np.minimum(alpha / safe_s, 1.0)
    cdf_testing = np.asarray(alt_cdf(testing_threshold, law))
    cdf_selection = float(alt_cdf(c, law))
    power = np.where(c * safe_s <= alpha,
                     2.0 * cdf_selection * cdf_testing - cdf_selection ** 2,
                     cdf_testing ** 2)
    return as_output(np.where(positive, power, 0.0))


def power_exact(c: float, alpha: float, mix: PairMixture) -> float:
    """
    Unconditional probability of rejecting a given false union hypothesis. With the hypothesis selected,
    |S| = 1 + |S_-i| where |S_-i| is the selected set size among the other m - 1 pairs.

    Parameters
    ----------
    c : float
        selection threshold in (0, 1)
    alpha : float
        familywise error level
    mix : PairMixture
        generative model, with at least one (1,1) pair

    Returns
    -------
    float
        power

    Raises
    ------
    ValueError
        if the mixture has no false union hypotheses
    """
    _check_has_false_hypotheses(mix)
    n0, n1, n2 = mix.type_counts()
    pmf_others = selected_count_pmf_from_counts(c, (n0, n1, n2 - 1), mix.law)
    sizes = 1 + np.arange(len(pmf_others))
    return float(np.sum(pmf_others * np.asarray(conditional_power(sizes, c, alpha, mix.law))))


def approximate_power_curve(c: ArrayLike, alpha: float, mix: PairMixture) -> ArrayLike:
    """
    P1(c) with |S| replaced by E|S(c)|, without checking that false hypotheses exist.
    c <= c_bar is equivalent to c E|S(c)| <= alpha since c E|S(c)| is increasing.
    """
    c = np.asarray(c, dtype=float)
    expected = np.asarray(expected_selected(c, mix), dtype=float)
    testing_threshold = np.minimum(alpha / np.where(expected > 0, expected, 1.0), 1.0)
    cdf_testing = np.asarray(alt_cdf(testing_threshold, mix.law))
    cdf_selection = np.asarray(alt_cdf(c, mix.law))
    power = np.where(c * expected <= alpha,
                     2.0 * cdf_selection * cdf_testing - cdf_selection ** 2,
                     cdf_testing ** 2)
    return as_output(power)


def power_approx(c: ArrayLike, alpha: float, mix: PairMixture) -> ArrayLike:
    """
    Approximate power P1(c): 2 F(c) F(alpha/E|S(c)|) - F(c)^2 for c <= c_bar and F(alpha/E|S(c)|)^2 above,
    where c_bar solves c E|S(c)| = alpha.

    Parameters
    ----------
    c : ArrayLike
        selection threshold(s) in (0, 1)
    alpha : float
        familywise error level
    mix : PairMixture
        generative model, with at least one (1,1) pair

    Returns
    -------
    ArrayLike
        P1(c)

    Raises
    ------
    ValueError
        if the mixture has no false union hypotheses
    """
    _check_has_false_hypotheses(mix)
    return approximate_power_curve(c, alpha, mix)


def bonferroni_power(alpha: float, m: int, law: AlternativeLaw) -> float:
    """
    Power of the one-stage Bonferroni procedure on the maximum p-values, F(alpha/m)^2.

    Parameters
    ----------
    alpha : float
        familywise error level
    m : int
        number of union hypotheses
    law : AlternativeLaw
        distribution of the non-null p-values

    Returns
    -------
    float
        power
    """
    if m < 1:
        error_msg = f'The number of union hypotheses m must be positive, got m={m}.'
        log.error(error_msg)
        raise ValueError(error_msg)
    return float(alt_cdf(alpha / m, law)) ** 2


def error_power_report(c: float, alpha: float, mix: PairMixture) -> ErrorPowerReport:
    """
    Collects exact and approximate familywise error rate and power at threshold c.
    Exact values are left out for m above EXACT_PMF_MAX_M, power values when the mixture has no
    false union hypotheses.

    Parameters
    ----------
    c : float
        selection threshold
    alpha : float
        familywise error level
    mix : PairMixture
        generative model

    Returns
    -------
    ErrorPowerReport
        the report
    """
    exact_available = mix.m <= EXACT_PMF_MAX_M
    has_false = mix.type_counts()[2] > 0 and mix.pi2 > 0
    if not has_false:
        log.warning('No false union hypotheses in the mixture, power is reported as undefined.')
    return ErrorPowerReport(
        c=c,
        alpha=alpha,
        fwer_exact=fwer_exact(c, alpha, mix) if exact_available else None,
        fwer_approx=float(fwer_approx(c, alpha, mix)),
        power_exact=power_exact(c, alpha, mix) if (exact_available and has_false) else None,
        power_approx=float(power_approx(c, alpha, mix)) if has_false else None)
