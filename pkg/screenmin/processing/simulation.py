"""
Monte Carlo estimation of the familywise error rate and power of union hypothesis procedures.

Every (replication, p-value column) pair draws from its own counter-based Philox stream derived from the
configured seed, so results do not depend on the order in which replications run or on the number of workers.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
import logging
import os
from typing import Optional

import numpy as np
import pandas as pd
from scipy.special import ndtr

from screenmin.analytics.thresholds import ThresholdSpec, resolve_threshold
from screenmin.config.config_classes import SimulationConfig
from screenmin.const.constants import CSV_FLOAT_FORMAT, CSV_NA_REP, Method, PairType, ThresholdKind
from screenmin.data.pvalue_matrix import PValueMatrix
from screenmin.processing.procedures import run_procedure

log = logging.getLogger(__name__)


@dataclass
class SimulatedDataset():
    """One generated p-value matrix together with the truth of each component hypothesis"""
    pvalues: PValueMatrix
    false1: np.ndarray  # H_i1 is false
    false2: np.ndarray  # H_i2 is false

    @property
    def union_false(self) -> np.ndarray:
        return self.false1 & self.false2

    @property
    def pair_types(self) -> np.ndarray:
        n_false = self.false1.astype(int) + self.false2.astype(int)
        labels = np.array([PairType.BOTH_NULL.value, PairType.ONE_FALSE.value, PairType.BOTH_FALSE.value])
        return labels[n_false]


def _truth_layout(m: int, counts: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
    # rows: (1,1) first, then (1,0), then (0,1), then (0,0)
    _, n1, n2 = counts
    n10 = n1 - n1 // 2
    n01 = n1 // 2
    index = np.arange(m)
    false1 = index < n2 + n10
    false2 = (index < n2) | ((index >= n2 + n10) & (index < n2 + n10 + n01))
    return false1, false2


def _column_stream(seed: int, replication_index: int, column: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(replication_index, column))))


def generate_pvalues(config: SimulationConfig, replication_index: int) -> SimulatedDataset:
    """
    Generates the p-value matrix of one replication. Test statistics follow
    Z_ij = sqrt(rho) W_j + sqrt(1 - rho) e_ij + mu_ij with W_j, e_ij independent standard normals, so the m
    statistics of column j are equicorrelated with correlation rho and the two columns are independent.
    mu_ij is snr1 (column 1) or snr2 (column 2) for false hypotheses and 0 otherwise; p-values are one-sided.

    Parameters
    ----------
    config : SimulationConfig
        a single grid point of a simulation config
    replication_index : int
        index of the replication, selects the random streams

    Returns
    -------
    SimulatedDataset
        p-values and truth labels
    """
    if not config.is_grid_point:
        raise ValueError('generate_pvalues needs a single (pi0, pi1) setting, use grid_points() first.')
    counts = config.pair_mixture().type_counts()
    false1, false2 = _truth_layout(config.m, counts)

    columns = []
    for column, (is_false, snr) in enumerate(((false1, config.snr1), (false2, config.snr2))):
        rng = _column_stream(config.seed, replication_index, column)
        shared = rng.standard_normal()
        noise = rng.standard_normal(config.m)
        statistics = np.sqrt(config.rho) * shared + np.sqrt(1.0 - config.rho) * noise + np.where(is_false, snr, 0.0)
        columns.append(ndtr(-statistics))

    width = len(str(config.m))
    ids = np.array([f"h{i + 1:0{width}d}" for i in range(config.m)])
    return SimulatedDataset(pvalues=PValueMatrix(ids=ids, p1=columns[0], p2=columns[1]), false1=false1, false2=false2)


@dataclass
class ReplicationOutcome():
    """Per-method outcome of one replication, in the order of config.methods"""
    false_rejection: np.ndarray  # at least one true union hypothesis rejected
    power: np.ndarray  # share of false union hypotheses rejected, NaN without false union hypotheses
    rejections: np.ndarray
    selected: np.ndarray


def _run_replication(replication_index: int, config: SimulationConfig,
                     oracle_value: Optional[float]) -> ReplicationOutcome:
    dataset = generate_pvalues(config, replication_index)
    union_false = dataset.union_false
    n_methods = len(config.methods)
    outcome = ReplicationOutcome(false_rejection=np.zeros(n_methods, dtype=bool),
                                 power=np.full(n_methods, np.nan),
                                 rejections=np.zeros(n_methods, dtype=int),
                                 selected=np.zeros(n_methods, dtype=int))
    for i, method_spec in enumerate(config.methods):
        uses_oracle = method_spec.method == Method.SCREENMIN and method_spec.threshold.kind == ThresholdKind.ORACLE
        result = run_procedure(dataset.pvalues, config.alpha, method_spec,
                               selection_threshold=oracle_value if uses_oracle else None)
        outcome.false_rejection[i] = bool(np.any(result.rejected & ~union_false))
        if union_false.any():
            outcome.power[i] = float(np.mean(result.rejected[union_false]))
        outcome.rejections[i] = result.n_rejected
        outcome.selected[i] = result.n_selected
    return outcome


@dataclass
class MethodSummary():
    """Monte Carlo estimates for one method at one grid point. Undefined values are NaN."""
    method: str
    pi0: float
    pi1: float
    pi2: float
    replications: int
    fwer: float
    fwer_se: float
    power: float
    power_se: float
    mean_rejections: float
    mean_selected: float
    selection_threshold: Optional[float] = None  # model based thresholds only


@dataclass
class SimulationSummary():
    """All method summaries of a study, grid points in config order and methods in config order within each"""
    rows: list[MethodSummary]

    def as_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([vars(row) for row in self.rows],
                            columns=list(MethodSummary.__dataclass_fields__.keys()))

    def get_row(self, method: str, pi1: Optional[float] = None) -> MethodSummary:
        matches = [row for row in self.rows if row.method == method and (pi1 is None or np.isclose(row.pi1, pi1))]
        if len(matches) != 1:
            raise KeyError(f'Expected one summary row for method={method} pi1={pi1}, found {len(matches)}.')
        return matches[0]

    def save_data_as_csv(self, out_path: os.PathLike):
        self.as_dataframe().to_csv(out_path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=CSV_NA_REP,
                                   lineterminator="\n", encoding="utf-8")
        log.info('Saved simulation summary to %s', out_path)


def _summarise(config: SimulationConfig, outcomes: list[ReplicationOutcome],
               oracle_value: Optional[float]) -> list[MethodSummary]:
    replications = len(outcomes)
    false_rejection = np.stack([o.false_rejection for o in outcomes])
    power = np.stack([o.power for o in outcomes])
    rejections = np.stack([o.rejections for o in outcomes])
    selected = np.stack([o.selected for o in outcomes])

    rows = []
    for i, method_spec in enumerate(config.methods):
        fwer = float(np.mean(false_rejection[:, i]))
        method_power = power[:, i]
        if np.all(np.isnan(method_power)):
            power_estimate, power_se = np.nan, np.nan
        else:
            power_estimate = float(np.mean(method_power))
            power_se = float(np.std(method_power, ddof=1) / np.sqrt(replications)) if replications > 1 else np.nan
        uses_oracle = method_spec.method == Method.SCREENMIN and method_spec.threshold.kind == ThresholdKind.ORACLE
        rows.append(MethodSummary(
            method=method_spec.label,
            pi0=config.pi0, pi1=config.pi1, pi2=config.pi2,
            replications=replications,
            fwer=fwer,
            fwer_se=float(np.sqrt(fwer * (1.0 - fwer) / replications)),
            power=power_estimate,
            power_se=power_se,
            mean_rejections=float(np.mean(rejections[:, i])),
            mean_selected=float(np.mean(selected[:, i])),
            selection_threshold=oracle_value if uses_oracle else None))
    return rows


def run_grid_point(config: SimulationConfig, workers: int = 1) -> list[MethodSummary]:
    """
    Runs all replications of one (pi0, pi1) setting

    Parameters
    ----------
    config : SimulationConfig
        a single grid point
    workers : int, optional
        number of worker processes, by default 1

    Returns
    -------
    list[MethodSummary]
        one summary per configured method
    """
    oracle_value = None
    if any(spec.method == Method.SCREENMIN and spec.threshold.kind == ThresholdKind.ORACLE
           for spec in config.methods):
        # computed once per setting with the single-law model, which is misspecified for unequal snr
        oracle_value = resolve_threshold(ThresholdSpec(kind=ThresholdKind.ORACLE), config.alpha,
                                         mix=config.pair_mixture()).value

    replicate = partial(_run_replication, config=config, oracle_value=oracle_value)
    indices = range(config.replications)
    if workers > 1:
        chunksize = max(1, config.replications // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            # map yields in submission order, which keeps the reduction identical to the serial one
            outcomes = list(executor.map(replicate, indices, chunksize=chunksize))
    else:
        outcomes = [replicate(i) for i in indices]
    return _summarise(config, outcomes, oracle_value)


def run_study(config: SimulationConfig, workers: int = 1) -> SimulationSummary:
    """
    Runs the Monte Carlo study for every grid point of the config

    Parameters
    ----------
    config : SimulationConfig
        simulation settings, possibly with a pi0/pi1 grid
    workers : int, optional
        number of worker processes, by default 1; results are identical for every value

    Returns
    -------
    SimulationSummary
        estimates per grid point and method
    """
    if workers < 1:
        raise ValueError(f'workers must be a positive integer, got {workers}.')
    rows = []
    for grid_point in config.grid_points():
        log.info('Simulating pi0=%s pi1=%s pi2=%s with %s replications', grid_point.pi0, grid_point.pi1,
                 grid_point.pi2, grid_point.replications)
        rows.extend(run_grid_point(grid_point, workers=workers))
    return SimulationSummary(rows=rows)
