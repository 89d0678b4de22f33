"""
Selection thresholds for ScreenMin: the default alpha/m, the solution c_bar of c E|S(c)| = alpha,
the oracle threshold maximising approximate power under the approximate familywise error constraint,
and the data-adaptive threshold gamma with its continuous counterpart.
"""
from __future__ import annotations

from dataclasses import dataclass
import logging
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from screenmin.const import constants
from screenmin.const.constants import OracleStatus, ThresholdKind
from screenmin.analytics.error_power import approximate_power_curve, fwer_approx, fwer_first_order
from screenmin.distributions.screening import PairMixture, expected_selected, local_linear_testing_threshold

log = logging.getLogger(__name__)


@dataclass
class ThresholdSpec():
    """A requested way of choosing the selection threshold, e.g. parsed from 'default' or 'fixed:0.001'"""
    kind: ThresholdKind
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind == ThresholdKind.FIXED:
            if self.value is None or not 0 < self.value < 1:
                error_msg = f'A fixed selection threshold must lie in (0, 1), got {self.value}.'
                log.error(error_msg)
                raise ValueError(error_msg)

    @classmethod
    def parse(cls, text: str) -> ThresholdSpec:
        kind_text, _, value_text = text.strip().partition(":")
        try:
            kind = ThresholdKind(kind_text)
        except ValueError:
            error_msg = (f'Unknown threshold kind "{kind_text}", expected one of '
                         f'{[k.value for k in ThresholdKind]} (fixed as fixed:<c>).')
            log.error(error_msg)
            raise ValueError(error_msg) from None
        if kind != ThresholdKind.FIXED:
            if value_text:
                error_msg = f'Only fixed thresholds take a value, got "{text}".'
                log.error(error_msg)
                raise ValueError(error_msg)
            return cls(kind=kind)
        try:
            value = float(value_text)
        except ValueError:
            error_msg = f'Could not read the fixed threshold value from "{text}".'
            log.error(error_msg)
            raise ValueError(error_msg) from None
        return cls(kind=kind, value=value)

    def __str__(self):
        if self.kind == ThresholdKind.FIXED:
            return f"{self.kind.value}:{self.value!r}"
        return self.kind.value


@dataclass
class ThresholdChoice():
    """A resolved selection threshold together with model based diagnostics when a mixture was available"""
    kind: ThresholdKind
    value: float
    constraint_value: Optional[float] = None  # g(value)
    expected_selected: Optional[float] = None  # E|S(value)|
    testing_threshold: Optional[float] = None  # u_c = alpha / E|S(value)|
    local_linear_testing_threshold: Optional[float] = None
    first_order_constraint: Optional[float] = None
    cbar: Optional[float] = None
    cbar_relative_gap: Optional[float] = None  # |value - cbar| / cbar
    status: Optional[OracleStatus] = None


def default_threshold(alpha: float, m: int) -> float:
    """
    Default ScreenMin selection threshold alpha / m

    Parameters
    ----------
    alpha : float
        familywise error level
    m : int
        number of union hypotheses

    Returns
    -------
    float
        alpha / m
    """
    if m < 1:
        error_msg = f'The number of union hypotheses m must be positive, got m={m}.'
        log.error(error_msg)
        raise ValueError(error_msg)
    return alpha / m


def cbar(alpha: float, mix: PairMixture) -> float:
    """
    Unique solution c_bar of c E|S(c)| = alpha. The map c -> c E|S(c)| is strictly increasing from 0 to m,
    so the root is bracketed by (0, 1).

    Parameters
    ----------
    alpha : float
        familywise error level in (0, 1)
    mix : PairMixture
        generative model

    Returns
    -------
    float
        c_bar
    """
    if not 0 < alpha < 1:
        error_msg = f'alpha must lie in (0, 1), got alpha={alpha}.'
        log.error(error_msg)
        raise ValueError(error_msg)

    def excess(c):
        return c * float(expected_selected(c, mix)) - alpha

    lower, upper = np.finfo(float).tiny, 1.0
    if not (excess(lower) < 0 < excess(upper)):
        raise ValueError(f'c E|S(c)| - alpha is not bracketed on ({lower}, {upper}) for alpha={alpha}.')
    root = brentq(excess, lower, upper, xtol=1e-300, rtol=constants.ORACLE_RELATIVE_TOLERANCE, maxiter=500)
    log.debug('c_bar=%s for alpha=%s, c_bar E|S(c_bar)|=%s', root, alpha, root * float(expected_selected(root, mix)))
    return float(root)


def _model_choice(kind: ThresholdKind, value: float, alpha: float, mix: PairMixture,
                  status: Optional[OracleStatus] = None, cbar_value: Optional[float] = None) -> ThresholdChoice:
    expected = float(expected_selected(value, mix))
    return ThresholdChoice(
        kind=kind,
        value=float(value),
        constraint_value=float(fwer_approx(value, alpha, mix)),
        expected_selected=expected,
        testing_threshold=alpha / expected if expected > 0 else None,
        local_linear_testing_threshold=(float(local_linear_testing_threshold(value, mix.law))
                                        if not mix.law.is_null else None),
        first_order_constraint=float(fwer_first_order(value, alpha, mix)),
        cbar=cbar_value,
        cbar_relative_gap=abs(float(value) - cbar_value) / cbar_value if cbar_value is not None else None,
        status=status)


def _refine_constraint_edge(infeasible_c: float, feasible_c: float, alpha: float, mix: PairMixture) -> float:
    """Root of g(c) = alpha between an infeasible and a feasible grid point, kept on the feasible side"""
    target = alpha * (1.0 - constants.ORACLE_TARGET_SLACK)

    def shifted_excess(c):
        return float(fwer_approx(c, alpha, mix)) - target

    if shifted_excess(feasible_c) > 0:
        return feasible_c
    lower, upper = sorted((infeasible_c, feasible_c))
    log.debug('Sign change of g(c) - alpha between c=%s and c=%s', lower, upper)
    root = brentq(shifted_excess, lower, upper, xtol=1e-300, rtol=constants.ORACLE_RELATIVE_TOLERANCE)
    if float(fwer_approx(root, alpha, mix)) > alpha:
        return feasible_c
    return float(root)


def oracle_threshold(alpha: float, mix: PairMixture) -> ThresholdChoice:
    """
    Oracle selection threshold c*: the c in (0, alpha] that maximises the approximate power under the
    approximate familywise error constraint g(c) <= alpha.

    g and the approximate power are evaluated on a log-spaced grid over [ORACLE_GRID_MIN, alpha] and the
    feasible grid point with the largest power is kept. g is not monotone in c, so the feasible set may
    consist of several intervals. When the best point borders an infeasible one the constraint binds and the
    boundary is refined by root finding; otherwise the power is maximised between the neighbouring grid points.
    When the constraint holds nowhere alpha is returned. The status records which case applies.

    Parameters
    ----------
    alpha : float
        familywise error level in (0, 1)
    mix : PairMixture
        generative model

    Returns
    -------
    ThresholdChoice
        the oracle threshold with its diagnostics
    """
    cbar_value = cbar(alpha, mix)
    grid = np.geomspace(constants.ORACLE_GRID_MIN, alpha, constants.ORACLE_GRID_POINTS)
    excess = np.asarray(fwer_approx(grid, alpha, mix)) - alpha
    feasible = excess <= 0

    if not feasible.any():
        log.warning('The approximate familywise error constraint fails on the whole grid up to alpha=%s, '
                    'using alpha as the selection threshold.', alpha)
        return _model_choice(ThresholdKind.ORACLE, alpha, alpha, mix, OracleStatus.INFEASIBLE, cbar_value)
    if feasible.all():
        log.warning('The approximate familywise error constraint never binds on (0, %s], using the maximiser '
                    'of the approximate power.', alpha)

    def power_at(c):
        return float(approximate_power_curve(c, alpha, mix))

    power = np.where(feasible, np.asarray(approximate_power_curve(grid, alpha, mix)), -np.inf)
    best = int(np.argmax(power))
    value = float(grid[best])
    infeasible_neighbours = [i for i in (best - 1, best + 1) if 0 <= i < len(grid) and not feasible[i]]

    if infeasible_neighbours:
        status = OracleStatus.CONSTRAINED
        for neighbour in infeasible_neighbours:
            candidate = _refine_constraint_edge(grid[neighbour], grid[best], alpha, mix)
            if power_at(candidate) >= power_at(value):
                value = candidate
    else:
        status = OracleStatus.UNCONSTRAINED
        lower, upper = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
        refined = minimize_scalar(lambda c: -power_at(c), bounds=(lower, upper), method="bounded")
        if -refined.fun > power[best] and float(fwer_approx(refined.x, alpha, mix)) <= alpha:
            value = float(refined.x)
    log.info('Oracle threshold c*=%s (c_bar=%s, %s) for alpha=%s', value, cbar_value, status.value, alpha)
    return _model_choice(ThresholdKind.ORACLE, value, alpha, mix, status, cbar_value)


def _validated_minima(minima: np.ndarray) -> np.ndarray:
    minima = np.asarray(minima, dtype=float)
    if minima.ndim != 1 or minima.size == 0:
        error_msg = 'At least one minimum p-value is required.'
        log.error(error_msg)
        raise ValueError(error_msg)
    if np.any(~((minima >= 0) & (minima <= 1))):
        error_msg = 'Minimum p-values must lie in [0, 1].'
        log.error(error_msg)
        raise ValueError(error_msg)
    return np.sort(minima)


def adaptive_gamma(minima: np.ndarray, alpha: float) -> float:
    """
    Adaptive threshold gamma = max{c in {alpha/m, ..., alpha/2, alpha} : c |S(c)| <= alpha},
    with |S(c)| = #{i : min_i <= c}. On the grid, c = alpha/k is feasible exactly when |S(alpha/k)| <= k,
    and k = m is always feasible.

    Parameters
    ----------
    minima : np.ndarray
        minimum p-value of each of the m union hypotheses
    alpha : float
        familywise error level

    Returns
    -------
    float
        gamma
    """
    sorted_minima = _validated_minima(minima)
    ks = np.arange(1, sorted_minima.size + 1)
    selected_counts = np.searchsorted(sorted_minima, alpha / ks, side="right")
    smallest_k = int(ks[selected_counts <= ks].min())
    return alpha / smallest_k


def continuous_adaptive(minima: np.ndarray, alpha: float) -> float:
    """
    Largest usable threshold c in (0, alpha] with c |S(c)| <= alpha. c |S(c)| is nondecreasing and jumps at
    the minima, so the feasible set is an interval; at the first infeasible jump the returned value is the
    largest double below the jump, or alpha/|S| if smaller, so that thresholding with <= reproduces the
    feasible selected set.

    Parameters
    ----------
    minima : np.ndarray
        minimum p-value of each of the m union hypotheses
    alpha : float
        familywise error level

    Returns
    -------
    float
        c_a
    """
    sorted_minima = _validated_minima(minima)
    # number selected when the threshold sits exactly at each minimum, ties included
    counts_at = np.searchsorted(sorted_minima, sorted_minima, side="right")
    infeasible = sorted_minima * counts_at > alpha
    if not infeasible.any():
        return alpha / sorted_minima.size
    first = int(np.argmax(infeasible))
    next_jump = np.nextafter(sorted_minima[first], 0.0)
    if first == 0:
        return float(min(next_jump, alpha))
    return float(min(next_jump, alpha / first))


def resolve_threshold(spec: ThresholdSpec,
                      alpha: float,
                      minima: Optional[np.ndarray] = None,
                      mix: Optional[PairMixture] = None,
                      m: Optional[int] = None) -> ThresholdChoice:
    """
    Turns a requested threshold kind into a numeric selection threshold.

    Parameters
    ----------
    spec : ThresholdSpec
        requested threshold
    alpha : float
        familywise error level
    minima : Optional[np.ndarray]
        observed minimum p-values, needed for the adaptive threshold
    mix : Optional[PairMixture]
        generative model, needed for the oracle threshold; adds diagnostics to the other kinds
    m : Optional[int]
        number of union hypotheses, taken from minima or mix when not given

    Returns
    -------
    ThresholdChoice
        the resolved threshold
    """
    if m is None:
        m = len(minima) if minima is not None else (mix.m if mix is not None else None)

    if spec.kind == ThresholdKind.ORACLE:
        if mix is None:
            error_msg = 'The oracle threshold needs the pair mixture and alternative law.'
            log.error(error_msg)
            raise ValueError(error_msg)
        return oracle_threshold(alpha, mix)

    if spec.kind == ThresholdKind.FIXED:
        value = spec.value
    elif spec.kind == ThresholdKind.DEFAULT:
        if m is None:
            raise ValueError('The default threshold needs the number of union hypotheses.')
        value = default_threshold(alpha, m)
    else:
        if minima is None:
            error_msg = 'The adaptive threshold needs the observed minimum p-values.'
            log.error(error_msg)
            raise ValueError(error_msg)
        value = adaptive_gamma(minima, alpha)

    if mix is not None:
        return _model_choice(spec.kind, value, alpha, mix)
    return ThresholdChoice(kind=spec.kind, value=float(value))
