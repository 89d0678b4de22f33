import os

import pytest
import yaml

from screenmin.config.config_classes import SimulationConfig
from screenmin.const.constants import Method, ThresholdKind
from screenmin.processing.procedures import MethodSpec

CONFIG_DIR = os.path.join('tests', 'test_data', 'configs')


def _config_dict(**overrides):
    with open(os.path.join(CONFIG_DIR, 'test_simulation_config.yaml'), 'r') as fh:
        config_dict = yaml.safe_load(fh)
    config_dict.update(overrides)
    return config_dict


def test_simulation_config_from_dict_raises_key_error():
    config_dict = {}
    with pytest.raises(KeyError):
        SimulationConfig.from_params(**config_dict)  # empty config should raise key error


def test_simulation_config_missing_key_is_named():
    with pytest.raises(KeyError, match="rho"):
        SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config_missing_key.yaml'))


def test_simulation_config_unexpected_key_is_named():
    with pytest.raises(KeyError, match="workers"):
        SimulationConfig.from_params(**_config_dict(workers=4))


def test_simulation_config_from_yaml():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config.yaml'))
    assert config.m == 40
    assert config.is_grid_point
    assert all(isinstance(method, MethodSpec) for method in config.methods)
    assert config.methods[0] == MethodSpec(Method.SCREENMIN, None)
    assert config.methods[1].threshold.kind == ThresholdKind.ORACLE
    assert config.methods[3].method == Method.ADAPTIVE
    assert config.pair_mixture().type_counts() == (28, 10, 2)


def test_simulation_config_from_json():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config.json'))
    assert config.methods[0].threshold.value == 0.005
    assert config.pi1 == 1.0


@pytest.mark.parametrize("field, value", [
    ("rho", 1.0),
    ("rho", -0.1),
    ("rho", False),
    ("alpha", True),
    ("snr1", True),
    ("m", True),
    ("m", 0),
    ("replications", 0),
    ("alpha", 0.0),
    ("snr2", -1.0),
    ("seed", -5),
    ("pi2", 0.2),
    ("methods", ["sampson"]),
    ("methods", []),
])
def test_simulation_config_invalid_field_is_named(field, value):
    with pytest.raises(ValueError, match=field if field != "pi2" else "pi0"):
        SimulationConfig.from_params(**_config_dict(**{field: value}))


def test_simulation_config_bad_rho_file():
    with pytest.raises(ValueError, match="rho"):
        SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config_bad_rho.yaml'))


def test_simulation_config_grid_points():
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config_grid.yaml'))
    assert not config.is_grid_point
    points = list(config.grid_points())
    assert [point.pi1 for point in points] == [0.0, 0.1, 0.2]
    assert all(point.is_grid_point for point in points)
    with pytest.raises(ValueError):
        config.pair_mixture()


def test_simulation_config_scalar_broadcast():
    config = SimulationConfig.from_params(**_config_dict(pi0=[0.95, 0.75], pi1=[0.0, 0.2]))
    assert len(list(config.grid_points())) == 2
    with pytest.raises(ValueError):
        SimulationConfig.from_params(**_config_dict(pi0=[0.95, 0.75], pi1=[0.0]))


def test_write_simulation_config_to_yaml(tmp_path):
    config = SimulationConfig.from_yaml(os.path.join(CONFIG_DIR, 'test_simulation_config_grid.yaml'))
    yaml_outpath = os.path.join(tmp_path, "test-out-config.yaml")
    config.save_to_yaml(yaml_outpath)
    # check config file exists:
    assert os.path.exists(yaml_outpath)
    # check we can read file back in:
    config_written = SimulationConfig.from_yaml(yaml_outpath)
    assert config_written == config


@pytest.mark.parametrize("config_name", sorted(os.listdir('configuration')))
def test_shipped_configs_load(config_name):
    config = SimulationConfig.from_yaml(os.path.join('configuration', config_name))
    grid = list(config.grid_points())
    assert len(grid) in (1, 5)
    for grid_point in grid:
        assert grid_point.pi0 + grid_point.pi1 + grid_point.pi2 == pytest.approx(1.0)
        assert grid_point.pair_mixture().m == config.m
