"""
Probability primitives: the standard normal law and the distribution of one-sided p-values
whose test statistic is normal with a mean shift (the signal to noise ratio) under the alternative.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class AlternativeLaw():
    """Law F of a non-null p-value.
    The test statistic is N(snr, 1) and the p-value is one-sided, so that F(u) = Phi(snr + Phi^-1(u)).
    The sample size and effect size are folded into snr, i.e. snr = sqrt(n) * mu.
    """
    snr: float

    def __post_init__(self):
        if not np.isfinite(self.snr) or self.snr < 0:
            error_msg = f'The signal to noise ratio snr must be a finite nonnegative number, got snr={self.snr}.'
            log.error(error_msg)
            raise ValueError(error_msg)

    @property
    def is_null(self) -> bool:
        return self.snr == 0

    def cdf(self, u: ArrayLike) -> ArrayLike:
        return alt_cdf(u, self)

    def pdf(self, u: ArrayLike) -> ArrayLike:
        return alt_pdf(u, self)


def as_output(values: np.ndarray) -> ArrayLike:
    return float(values) if np.ndim(values) == 0 else values


def std_normal_cdf(x: ArrayLike) -> ArrayLike:
    """
    Standard normal cumulative distribution function Phi(x)

    Parameters
    ----------
    x : ArrayLike
        finite real value(s)

    Returns
    -------
    ArrayLike
        Phi(x), in [0, 1]
    """
    return as_output(ndtr(np.asarray(x, dtype=float)))


def std_normal_quantile(p: ArrayLike) -> ArrayLike:
    """
    Standard normal quantile function Phi^-1(p)

    Parameters
    ----------
    p : ArrayLike
        probability (or probabilities) strictly between 0 and 1

    Returns
    -------
    ArrayLike
        x such that Phi(x) = p

    Raises
    ------
    ValueError
        if any p is outside the open interval (0, 1)
    """
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0) & (p < 1))):
        error_msg = f'The normal quantile is only defined for probabilities in (0, 1), got p={p}.'
        log.error(error_msg)
        raise ValueError(error_msg)
    return as_output(ndtri(p))


def alt_cdf(u: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    Cumulative distribution function F of a non-null p-value, F(u) = Phi(snr + Phi^-1(u)).
    u is clamped to [0, 1], so that F(0) = 0 and F(1) = 1 exactly.

    Parameters
    ----------
    u : ArrayLike
        p-value level(s)
    law : AlternativeLaw
        the alternative law

    Returns
    -------
    ArrayLike
        F(u)
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    if law.is_null:
        return as_output(u)
    # ndtri maps 0 and 1 to -inf and inf, which ndtr maps back to 0 and 1
    return as_output(ndtr(law.snr + ndtri(u)))


def alt_sf(u: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """1 - F(u) = Phi(-snr - Phi^-1(u)), without cancellation for u close to 1"""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    if law.is_null:
        return as_output(1.0 - u)
    return as_output(ndtr(-law.snr - ndtri(u)))


def alt_pdf(u: ArrayLike, law: AlternativeLaw) -> ArrayLike:
    """
    Density f of a non-null p-value, f(u) = phi(snr + z) / phi(z) = exp(-snr * z - snr^2 / 2) with z = Phi^-1(u).
    The density is strictly decreasing in u for snr > 0.

    Parameters
    ----------
    u : ArrayLike
        p-value level(s) in the open interval (0, 1)
    law : AlternativeLaw
        the alternative law

    Returns
    -------
    ArrayLike
        f(u)

    Raises
    ------
    ValueError
        if any u is outside (0, 1), where the density is unbounded or zero
    """
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        error_msg = f'The p-value density is only evaluated on the open interval (0, 1), got u={u}.'
        log.error(error_msg)
        raise ValueError(error_msg)
    z = ndtri(u)
    return as_output(np.exp(-law.snr * z - 0.5 * law.snr ** 2))
