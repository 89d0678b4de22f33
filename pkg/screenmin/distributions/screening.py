"""
Distributions induced by screening on the minimum p-value: selection probabilities, the joint law of
(max, min), the conditional law of the maximum given selection and the law of the selected set size.

All results assume independent p-values within and across pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Callable, Tuple

import numpy as np
from scipy.stats import binom

from screenmin.const.constants import PROPORTION_SUM_TOLERANCE, PairType
from screenmin.distributions.alternative_law import AlternativeLaw, ArrayLike, alt_cdf, alt_pdf, alt_sf, as_output

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairMixture():
    """Generative model for m union hypotheses.
    pi0, pi1 and pi2 are the proportions of (0,0), one-false and (1,1) pairs, law is the
    distribution of every non-null p-value.
    """
    m: int
    pi0: float
    pi1: float
    pi2: float
    law: AlternativeLaw

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            self._raise(f'The number of union hypotheses m must be a positive integer, got m={self.m}.')
        for name in ("pi0", "pi1", "pi2"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0 or value > 1:
                self._raise(f'The proportion {name} must lie in [0, 1], got {name}={value}.')
        total = self.pi0 + self.pi1 + self.pi2
        if abs(total - 1.0) > PROPORTION_SUM_TOLERANCE:
            self._raise(f'The proportions pi0, pi1, pi2 must sum to 1, got {self.pi0} + {self.pi1} + {self.pi2} '
                        f'= {total}.')

    @staticmethod
    def _raise(error_msg: str):
        log.error(error_msg)
        raise ValueError(error_msg)

    @property
    def proportions(self) -> Tuple[float, float, float]:
        return (self.pi0, self.pi1, self.pi2)

    def type_counts(self) -> Tuple[int, int, int]:
        """
        Integer numbers of (0,0), one-false and (1,1) pairs, using largest-remainder rounding of pi * m.
        Ties in the remainders are broken in the order (0,0), one-false, (1,1).

        Returns
        -------
        Tuple[int, int, int]
            (n0, n1, n2), summing to m
        """
        exact = np.array(self.proportions) * self.m
        counts = np.floor(exact + 1e-9).astype(int)
        remainders = exact - counts
        missing = int(self.m - counts.sum())
        for index in np.argsort(-remainders, kind="stable")[:max(missing, 0)]:
            counts[index] += 1
        return tuple(int(count) for count in counts)


def component_cdfs(kind: PairType, law: AlternativeLaw) -> Tuple[Callable, Callable]:
    """
    Marginal CDFs of the two component p-values of a pair. Null components are standard uniform,
    false components follow law.

    Parameters
    ----------
    kind : PairType
        truth pattern of the pair
    law : AlternativeLaw
        distribution of the non-null p-values

    Returns
    -------
    Tuple[Callable, Callable]
        (CDF of p1, CDF of p2)
    """
    def uniform(u):
        return np.clip(np.asarray(u, dtype=float), 0.0, 1.0)

    def non_null(u):
        return np.asarray(alt_cdf(u, law))

    if kind == PairType.BOTH_NULL:
        return uniform, uniform
    if kind == PairType.ONE_FALSE:
        return uniform, non_null
    return non_null, non_null


def selection_prob(kind: PairType, c: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    Probability that a pair is selected, i.e. that its minimum p-value is at most c:
    1 - (1 - F1(c)) (1 - F2(c)).

    Parameters
    ----------
    kind : PairType
        truth pattern of the pair
    c : ArrayLike
        selection threshold(s) in (0, 1)
    law : AlternativeLaw
        distribution of the non-null p-values

    Returns
    -------
    ArrayLike
        Pr(min <= c)
    """
    cdf1, cdf2 = component_cdfs(kind, law)
    return as_output(1.0 - (1.0 - cdf1(c)) * (1.0 - cdf2(c)))


def joint_cdf_max_min(u: ArrayLike, c: ArrayLike, kind: PairType, law: AlternativeLaw) -> ArrayLike:
    """
    Joint probability Pr(max <= u, min <= c) for a pair.
    For u <= c it is Pr(max <= u); for u > c the pairs with max in (c, u] and min <= c are added.

    Parameters
    ----------
    u : ArrayLike
        level(s) for the maximum p-value
    c : ArrayLike
        selection threshold(s)
    kind : PairType
        truth pattern of the pair
    law : AlternativeLaw
        distribution of the non-null p-values

    Returns
    -------
    ArrayLike
        Pr(max <= u, min <= c)
    """
    cdf1, cdf2 = component_cdfs(kind, law)
    u = np.asarray(u, dtype=float)
    c = np.asarray(c, dtype=float)
    f1_u, f2_u = cdf1(u), cdf2(u)
    f1_c, f2_c = cdf1(c), cdf2(c)
    below = f1_u * f2_u
    above = f1_c * f2_c + f1_c * (f2_u - f2_c) + f2_c * (f1_u - f1_c)
    return as_output(np.where(u <= c, below, above))


def p0(u: ArrayLike, c: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    Distribution of the maximum p-value of a true one-false pair conditional on the pair being selected,
    P0(u, c) = Pr(max <= u | min <= c):
    u F(u) / (F(c) + c - c F(c)) for u <= c and (c F(u) + u F(c) - c F(c)) / (F(c) + c - c F(c)) for u > c.

    Parameters
    ----------
    u : ArrayLike
        level(s) of the maximum p-value
    c : ArrayLike
        selection threshold(s) in (0, 1)
    law : AlternativeLaw
        distribution of the non-null p-value of the pair

    Returns
    -------
    ArrayLike
        P0(u, c)
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    numerator = np.asarray(joint_cdf_max_min(u, c, PairType.ONE_FALSE, law))
    # the denominator is at least c, tiny only guards against underflow of extreme thresholds
    denominator = np.maximum(np.asarray(selection_prob(PairType.ONE_FALSE, c, law)), np.finfo(float).tiny)
    return as_output(np.where(u >= 1.0, 1.0, np.clip(numerator / denominator, 0.0, 1.0)))


def p0_complement(u: ArrayLike, c: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    1 - P0(u, c) = Pr(max > u | min <= c) for a one-false pair, computed from its own numerator so that it keeps
    its relative precision when P0 is close to one:
    (Pr(min <= c) - u F(u)) / Pr(min <= c) for u <= c and (c (1 - F(u)) + F(c) (1 - u)) / Pr(min <= c) for u > c.
    It is exactly 0 for u >= 1.

    Parameters
    ----------
    u : ArrayLike
        level(s) of the maximum p-value
    c : ArrayLike
        selection threshold(s) in (0, 1)
    law : AlternativeLaw
        distribution of the non-null p-value of the pair

    Returns
    -------
    ArrayLike
        1 - P0(u, c)
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    c = np.asarray(c, dtype=float)
    selected = np.maximum(np.asarray(selection_prob(PairType.ONE_FALSE, c, law)), np.finfo(float).tiny)
    below = selected - u * np.asarray(alt_cdf(u, law))
    above = c * np.asarray(alt_sf(u, law)) + np.asarray(alt_cdf(c, law)) * (1.0 - u)
    return as_output(np.clip(np.where(u <= c, below, above) / selected, 0.0, 1.0))


def p00(u: ArrayLike, c: ArrayLike) -> ArrayLike:
    """
    Distribution of the maximum p-value of a (0,0) pair conditional on selection:
    u^2 / (c (2 - c)) for u <= c and (2u - c) / (2 - c) for u >= c.

    Parameters
    ----------
    u : ArrayLike
        level(s) of the maximum p-value
    c : ArrayLike
        selection threshold(s) in (0, 1)

    Returns
    -------
    ArrayLike
        Pr(max <= u | min <= c) for a pair of independent uniforms
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    c = np.asarray(c, dtype=float)
    below = u ** 2 / (c * (2.0 - c))
    above = (2.0 * u - c) / (2.0 - c)
    return as_output(np.where(u <= c, below, above))


def conditional_null_gap(u: ArrayLike, c: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    p0(u, c) - p00(u, c). The familywise error bound applies P0 to every selected true hypothesis,
    which is conservative for (0,0) pairs wherever this gap is nonnegative.
    """
    return as_output(np.asarray(p0(u, c, law)) - np.asarray(p00(u, c)))


def expected_selected(c: ArrayLike, mix: PairMixture) -> ArrayLike:
    """
    Expected size of the selected set, E|S(c)| = m [pi0 c(2 - c) + pi1 (c + F(c) - c F(c)) + pi2 (1 - (1 - F(c))^2)].

    Parameters
    ----------
    c : ArrayLike
        selection threshold(s)
    mix : PairMixture
        generative model

    Returns
    -------
    ArrayLike
        E|S(c)|
    """
    expected = mix.m * (
        mix.pi0 * np.asarray(selection_prob(PairType.BOTH_NULL, c, mix.law))
        + mix.pi1 * np.asarray(selection_prob(PairType.ONE_FALSE, c, mix.law))
        + mix.pi2 * np.asarray(selection_prob(PairType.BOTH_FALSE, c, mix.law)))
    return as_output(expected)


def selected_count_pmf_from_counts(c: float, counts: Tuple[int, int, int], law: AlternativeLaw) -> np.ndarray:
    """
    Exact law of the number of selected pairs among n0 (0,0), n1 one-false and n2 (1,1) independent pairs:
    the convolution of three binomials.

    Parameters
    ----------
    c : float
        selection threshold
    counts : Tuple[int, int, int]
        (n0, n1, n2)
    law : AlternativeLaw
        distribution of the non-null p-values

    Returns
    -------
    np.ndarray
        pmf indexed 0..n0 + n1 + n2
    """
    pmf = np.ones(1)
    for kind, count in zip(PairType, counts):
        if count == 0:
            continue
        probability = float(selection_prob(kind, c, law))
        pmf = np.convolve(pmf, binom.pmf(np.arange(count + 1), count, probability))
    return pmf


def selected_count_pmf(c: float, mix: PairMixture) -> np.ndarray:
    """
    Exact pmf of |S(c)| for the integer pair counts of the mixture (largest-remainder rounding).
    With pi1 = 1 this is the Binomial(m, Pr(min <= c)) pmf.

    Parameters
    ----------
    c : float
        selection threshold in (0, 1)
    mix : PairMixture
        generative model

    Returns
    -------
    np.ndarray
        pmf indexed 0..m
    """
    return selected_count_pmf_from_counts(c, mix.type_counts(), mix.law)


def local_linear_testing_threshold(c: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    Local linear approximation of the testing threshold u_c at which P0(u_c, c) = u_c,
    u_c ~ c f(c) / (f(c) + F(c) - 1). Close to c whenever f(c) dominates 1 - F(c).
    """
    c = np.asarray(c, dtype=float)
    density = np.asarray(alt_pdf(c, law))
    return as_output(c * density / (density + np.asarray(alt_cdf(c, law)) - 1.0))
