"""
Multiple testing procedures for union hypotheses applied to an observed p-value matrix:
ScreenMin with a given selection threshold, adaptive ScreenMin, and one-stage Bonferroni and Holm
on the maximum p-values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
from typing import Optional

import numpy as np

from screenmin.analytics.thresholds import ThresholdSpec, adaptive_gamma, resolve_threshold
from screenmin.const.constants import Method, ThresholdKind
from screenmin.data.procedure_result import ProcedureResult
from screenmin.data.pvalue_matrix import PValueMatrix
from screenmin.distributions.screening import PairMixture

log = logging.getLogger(__name__)


@dataclass
class MethodSpec():
    """A procedure together with the way its selection threshold is chosen (ScreenMin only)"""
    method: Method
    threshold: Optional[ThresholdSpec] = field(default=None)

    def __post_init__(self):
        if self.method == Method.SCREENMIN and self.threshold is None:
            self.threshold = ThresholdSpec(kind=ThresholdKind.DEFAULT)
        if self.method != Method.SCREENMIN and self.threshold is not None:
            error_msg = f'Only screenmin takes a selection threshold, got {self.method.value}:{self.threshold}.'
            log.error(error_msg)
            raise ValueError(error_msg)

    @classmethod
    def parse(cls, text: str) -> MethodSpec:
        """
        Parses identifiers such as 'screenmin:default', 'screenmin:fixed:0.001', 'screenmin:oracle',
        'adaptive', 'bonferroni' or 'holm'
        """
        method_text, _, threshold_text = text.strip().partition(":")
        try:
            method = Method(method_text)
        except ValueError:
            error_msg = f'Unknown method "{method_text}", expected one of {[m.value for m in Method]}.'
            log.error(error_msg)
            raise ValueError(error_msg) from None
        threshold = ThresholdSpec.parse(threshold_text) if threshold_text else None
        return cls(method=method, threshold=threshold)

    @property
    def label(self) -> str:
        if self.threshold is None:
            return self.method.value
        return f"{self.method.value}:{self.threshold}"

    def __str__(self):
        return self.label


def _check_alpha(alpha: float):
    if not 0 < alpha < 1:
        error_msg = f'alpha must lie in (0, 1), got alpha={alpha}.'
        log.error(error_msg)
        raise ValueError(error_msg)


def screenmin(pmat: PValueMatrix, alpha: float, c: float, adjust_with_minimum: bool = False) -> ProcedureResult:
    """
    ScreenMin: select row i if min(p_i1, p_i2) <= c, then test the selected rows with Bonferroni on the maximum
    p-value, i.e. adjusted p-value min(|S| max_i, 1) for selected rows and 1 otherwise.

    Parameters
    ----------
    pmat : PValueMatrix
        observed p-values
    alpha : float
        familywise error level
    c : float
        selection threshold in (0, 1)
    adjust_with_minimum : bool, optional
        adjust the minimum instead of the maximum p-value, the literal reading of the displayed adjusted
        p-value formula. Off by default, since the testing threshold alpha/|S| applies to the maximum.

    Returns
    -------
    ProcedureResult
        selection, adjusted p-values and rejections
    """
    _check_alpha(alpha)
    if not 0 < c < 1:
        error_msg = f'The selection threshold c must lie in (0, 1), got c={c}.'
        log.error(error_msg)
        raise ValueError(error_msg)
    selected = pmat.pmin <= c
    n_selected = int(selected.sum())
    tested = pmat.pmin if adjust_with_minimum else pmat.pmax
    adjusted_p = np.where(selected, np.minimum(n_selected * tested, 1.0), 1.0)
    log.debug('ScreenMin at c=%s selected %s of %s rows', c, n_selected, pmat.m)
    return ProcedureResult(
        ids=pmat.ids, p1=pmat.p1, p2=pmat.p2,
        selected=selected,
        adjusted_p=adjusted_p,
        rejected=adjusted_p <= alpha,
        method=Method.SCREENMIN,
        alpha=alpha,
        selection_threshold=c,
        testing_threshold=alpha / n_selected if n_selected > 0 else None)


def adaptive_screenmin(pmat: PValueMatrix, alpha: float) -> ProcedureResult:
    """
    Adaptive ScreenMin: a single threshold gamma is used for selection and testing, so a row is rejected
    when its maximum p-value is at most gamma. Adjusted p-values are max_i alpha / gamma (capped at 1) for
    selected rows and 1 otherwise, which keeps rejected <=> adjusted_p <= alpha.

    Parameters
    ----------
    pmat : PValueMatrix
        observed p-values
    alpha : float
        familywise error level

    Returns
    -------
    ProcedureResult
        selection, adjusted p-values and rejections
    """
    _check_alpha(alpha)
    gamma = adaptive_gamma(pmat.pmin, alpha)
    selected = pmat.pmin <= gamma
    adjusted_p = np.where(selected, np.minimum(pmat.pmax * (alpha / gamma), 1.0), 1.0)
    log.debug('Adaptive ScreenMin gamma=%s selected %s of %s rows', gamma, int(selected.sum()), pmat.m)
    return ProcedureResult(
        ids=pmat.ids, p1=pmat.p1, p2=pmat.p2,
        selected=selected,
        adjusted_p=adjusted_p,
        rejected=adjusted_p <= alpha,
        method=Method.ADAPTIVE,
        alpha=alpha,
        selection_threshold=gamma,
        testing_threshold=gamma)


def bonferroni_max(pmat: PValueMatrix, alpha: float) -> ProcedureResult:
    """
    One-stage Bonferroni on the maximum p-values, adjusted p-value min(m max_i, 1)
    """
    _check_alpha(alpha)
    adjusted_p = np.minimum(pmat.m * pmat.pmax, 1.0)
    return ProcedureResult(
        ids=pmat.ids, p1=pmat.p1, p2=pmat.p2,
        selected=np.ones(pmat.m, dtype=bool),
        adjusted_p=adjusted_p,
        rejected=adjusted_p <= alpha,
        method=Method.BONFERRONI,
        alpha=alpha,
        testing_threshold=alpha / pmat.m)


def holm_max(pmat: PValueMatrix, alpha: float) -> ProcedureResult:
    """
    Holm's step-down procedure on the maximum p-values. With the maxima sorted increasingly, the adjusted
    p-value of the k-th smallest (k = 0..m-1) is the running maximum of (m - k) p_(k), capped at 1.
    """
    _check_alpha(alpha)
    order = np.argsort(pmat.pmax, kind="stable")
    steps = (pmat.m - np.arange(pmat.m)) * pmat.pmax[order]
    adjusted_sorted = np.minimum(np.maximum.accumulate(steps), 1.0)
    adjusted_p = np.empty(pmat.m)
    adjusted_p[order] = adjusted_sorted
    return ProcedureResult(
        ids=pmat.ids, p1=pmat.p1, p2=pmat.p2,
        selected=np.ones(pmat.m, dtype=bool),
        adjusted_p=adjusted_p,
        rejected=adjusted_p <= alpha,
        method=Method.HOLM,
        alpha=alpha)


def run_procedure(pmat: PValueMatrix,
                  alpha: float,
                  method_spec: MethodSpec,
                  mix: Optional[PairMixture] = None,
                  selection_threshold: Optional[float] = None) -> ProcedureResult:
    """
    Runs the procedure named by method_spec

    Parameters
    ----------
    pmat : PValueMatrix
        observed p-values
    alpha : float
        familywise error level
    method_spec : MethodSpec
        procedure and threshold choice
    mix : Optional[PairMixture]
        generative model, required for the oracle threshold
    selection_threshold : Optional[float]
        an already resolved ScreenMin threshold, which skips resolving method_spec.threshold

    Returns
    -------
    ProcedureResult
        the procedure's result
    """
    if method_spec.method == Method.ADAPTIVE:
        return adaptive_screenmin(pmat, alpha)
    if method_spec.method == Method.BONFERRONI:
        return bonferroni_max(pmat, alpha)
    if method_spec.method == Method.HOLM:
        return holm_max(pmat, alpha)
    if selection_threshold is None:
        # model diagnostics are only worth computing when the model defines the threshold
        model = mix if method_spec.threshold.kind == ThresholdKind.ORACLE else None
        selection_threshold = resolve_threshold(method_spec.threshold, alpha, minima=pmat.pmin, mix=model,
                                                m=pmat.m).value
    return screenmin(pmat, alpha, selection_threshold)
