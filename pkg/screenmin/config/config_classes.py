"""
Configuration control dataclasses for screenmin.
"""
from __future__ import annotations

from abc import ABC, abstractclassmethod
from dataclasses import asdict, dataclass, replace
import logging
from typing import Iterator, Union

import numpy as np
import yaml

from screenmin.const.constants import PROPORTION_SUM_TOLERANCE
from screenmin.distributions.alternative_law import AlternativeLaw
from screenmin.distributions.screening import PairMixture
from screenmin.processing.procedures import MethodSpec

log = logging.getLogger(__name__)


class Config(ABC):
    """
    Abstract base class for configuration classes
    """

    @classmethod
    def _validate_dict(cls, config_dict):
        config_dict_key_set = set(config_dict.keys())
        reference_dict_key_set = {k for k, v in cls.__dataclass_fields__.items() if v.init}

        if config_dict_key_set != reference_dict_key_set:
            error_msg = f'The config dictionary is not in the correct format for {cls}. '
            unexpected_keys = sorted(config_dict_key_set - reference_dict_key_set)
            if len(unexpected_keys) > 0:
                error_msg += f'The config dictionary contains the following unexpected keys: {unexpected_keys}. '
            missing_keys = sorted(reference_dict_key_set - config_dict_key_set)
            if len(missing_keys) > 0:
                error_msg += f'The config dictionary is missing the following keys: {missing_keys}. '
            log.error(error_msg)
            raise KeyError(error_msg)

    @classmethod
    def from_yaml(cls, yaml_abspath):
        # JSON documents are valid YAML, so .json configs load the same way
        with open(yaml_abspath, 'r', encoding='utf-8') as fh:
            config_dict = yaml.safe_load(fh)
        if not isinstance(config_dict, dict):
            error_msg = f'The config file {yaml_abspath} does not contain a mapping of field names to values.'
            log.error(error_msg)
            raise ValueError(error_msg)
        return cls.from_params(**config_dict)

    @abstractclassmethod
    def from_params(self):
        pass


def _invalid_field(field_name: str, reason: str):
    error_msg = f'Invalid simulation config field "{field_name}": {reason}'
    log.error(error_msg)
    raise ValueError(error_msg)


def _is_number(value) -> bool:
    # bool is a subclass of int
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass
class SimulationConfig(Config):
    """Settings of a Monte Carlo study.
    pi0 and pi1 may be lists, which define a grid of settings (scalars are broadcast against lists);
    use grid_points() to get one scalar config per setting.
    """
    m: int
    pi0: Union[float, list[float]]
    pi1: Union[float, list[float]]
    pi2: float
    snr1: float  # signal to noise ratio of false H_i1
    snr2: float  # signal to noise ratio of false H_i2
    rho: float  # correlation of the test statistics within a p-value column
    alpha: float
    replications: int
    seed: int
    methods: list[MethodSpec]

    @classmethod
    def from_params(cls, **config):
        # validate we get expected values
        cls._validate_dict(config)
        config_obj = cls(**config)
        config_obj._init_methods()
        config_obj._validate_values()
        return config_obj

    def _init_methods(self):
        if not isinstance(self.methods, list) or len(self.methods) == 0:
            _invalid_field("methods", f"expected a non-empty list of method identifiers, got {self.methods}.")
        new_methods = []
        for method in self.methods:
            if isinstance(method, MethodSpec):  # in case already initiated
                new_methods.append(method)
            else:
                try:
                    new_methods.append(MethodSpec.parse(str(method)))
                except ValueError as error:
                    _invalid_field("methods", str(error))
        self.methods = new_methods

    def _validate_values(self):
        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            _invalid_field("m", f"expected a positive integer, got {self.m}.")
        if isinstance(self.replications, bool) or not isinstance(self.replications, int) or self.replications < 1:
            _invalid_field("replications", f"expected a positive integer, got {self.replications}.")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            _invalid_field("seed", f"expected an unsigned 64-bit integer, got {self.seed}.")
        for name in ("snr1", "snr2"):
            value = getattr(self, name)
            if not _is_number(value) or not np.isfinite(value) or value < 0:
                _invalid_field(name, f"expected a finite nonnegative number, got {value}.")
        if not _is_number(self.rho) or not 0 <= self.rho < 1:
            _invalid_field("rho", f"expected a number in [0, 1), got {self.rho}.")
        if not _is_number(self.alpha) or not 0 < self.alpha < 1:
            _invalid_field("alpha", f"expected a number in (0, 1), got {self.alpha}.")

        pi0_values, pi1_values = self._proportion_grid()
        if not _is_number(self.pi2) or not 0 <= self.pi2 <= 1:
            _invalid_field("pi2", f"expected a number in [0, 1], got {self.pi2}.")
        for name, values in (("pi0", pi0_values), ("pi1", pi1_values)):
            if any((not _is_number(v)) or not 0 <= v <= 1 for v in values):
                _invalid_field(name, f"expected numbers in [0, 1], got {getattr(self, name)}.")
        for pi0, pi1 in zip(pi0_values, pi1_values):
            if abs(pi0 + pi1 + self.pi2 - 1.0) > PROPORTION_SUM_TOLERANCE:
                _invalid_field("pi0", f"pi0 + pi1 + pi2 must be 1, got {pi0} + {pi1} + {self.pi2}.")

    def _proportion_grid(self) -> tuple[list, list]:
        pi0_values = self.pi0 if isinstance(self.pi0, list) else None
        pi1_values = self.pi1 if isinstance(self.pi1, list) else None
        if pi0_values is not None and pi1_values is not None and len(pi0_values) != len(pi1_values):
            _invalid_field("pi1", f"pi0 and pi1 grids must have the same length, got {self.pi0} and {self.pi1}.")
        length = len(pi0_values) if pi0_values is not None else (len(pi1_values) if pi1_values is not None else 1)
        if length == 0:
            _invalid_field("pi1", "the proportion grid is empty.")
        pi0_values = pi0_values if pi0_values is not None else [self.pi0] * length
        pi1_values = pi1_values if pi1_values is not None else [self.pi1] * length
        return pi0_values, pi1_values

    @property
    def is_grid_point(self) -> bool:
        return not isinstance(self.pi0, list) and not isinstance(self.pi1, list)

    def grid_points(self) -> Iterator[SimulationConfig]:
        """
        Yields one config per (pi0, pi1) setting, in grid order
        """
        for pi0, pi1 in zip(*self._proportion_grid()):
            yield replace(self, pi0=float(pi0), pi1=float(pi1))

    def pair_mixture(self) -> PairMixture:
        """
        The single-law model used by model based thresholds. With unequal signal to noise ratios the model is
        deliberately misspecified and uses snr1 for every false hypothesis.
        """
        if not self.is_grid_point:
            raise ValueError('pair_mixture needs a single (pi0, pi1) setting, use grid_points() first.')
        return PairMixture(m=self.m, pi0=self.pi0, pi1=self.pi1, pi2=self.pi2, law=AlternativeLaw(snr=self.snr1))

    def as_dict(self) -> dict:
        config_dict = asdict(self)
        config_dict["methods"] = [method.label for method in self.methods]
        return config_dict

    def save_to_yaml(self, out_path):
        with open(out_path, 'w', encoding='utf-8') as outfile:
            outfile.write(yaml.safe_dump(self.as_dict(), sort_keys=False))
