"""
Tests for configuration loading and logging setup
"""

import sys
import copy
import logging
from pathlib import Path

import pytest
import yaml

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.utils.config_loader import (
    apply_overrides, get_default_config, get_project_root, load_config, resolve_output_paths
)
from src.utils.logger import SuiteProgress, get_logger, setup_logger


def write_yaml(tmp_path: Path, config) -> str:
    path = tmp_path / 'config.yaml'
    path.write_text(yaml.safe_dump(config), encoding='utf-8')
    return str(path)


def test_project_config_loads():
    config = load_config()
    assert config['engine']['r_x_fractions'] == [1.0, 0.5, 0.125]
    assert config['harnack']['mesh'] == pytest.approx(0.1)


def test_defaults_mirror_config_file():
    assert load_config() == get_default_config()


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / 'absent.yaml'))


def test_missing_section(tmp_path):
    config = get_default_config()
    del config['hausdorff']
    with pytest.raises(ValueError, match='hausdorff'):
        load_config(write_yaml(tmp_path, config))


def test_missing_key(tmp_path):
    config = get_default_config()
    del config['green']['samples']
    with pytest.raises(ValueError, match='samples'):
        load_config(write_yaml(tmp_path, config))


@pytest.mark.parametrize("section,key,value", [
    ('harnack', 'eps_chain', 1.5),
    ('harnack', 'mesh', 0.0),
    ('green', 'samples', 0),
    ('engine', 'r_x_fractions', []),
    ('engine', 'r_x_fractions', [0.5, 1.5]),
    ('geometry', 'eps_geo_sdf', -1e-6),
])
def test_invalid_values(tmp_path, section, key, value):
    config = get_default_config()
    config[section][key] = value
    with pytest.raises(ValueError):
        load_config(write_yaml(tmp_path, config))


def test_non_mapping_file(tmp_path):
    path = tmp_path / 'config.yaml'
    path.write_text("- just\n- a list\n", encoding='utf-8')
    with pytest.raises(ValueError):
        load_config(str(path))


def test_apply_overrides_copies():
    config = get_default_config()
    before = copy.deepcopy(config)
    merged = apply_overrides(config, seed=7, samples=128, mesh=0.05, shell=1e-3)
    assert config == before
    assert merged['engine']['seed'] == 7
    assert merged['green']['samples'] == 128
    assert merged['harnack']['mesh'] == pytest.approx(0.05)
    assert merged['green']['eps_shell_factor'] == pytest.approx(1e-3)
    assert apply_overrides(config) == config


@pytest.mark.parametrize("kwargs", [{'samples': 0}, {'mesh': 0.0}, {'shell': -1.0}])
def test_apply_overrides_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        apply_overrides(get_default_config(), **kwargs)


def test_resolve_output_paths():
    paths = resolve_output_paths(get_default_config())
    assert paths['reports_dir'] == get_project_root() / 'output' / 'reports'
    assert paths['scenarios_dir'].is_dir()


def test_module_loggers_live_under_package_root():
    assert get_logger('src.potential.harnack').name == 'sbh.harnack'
    assert get_logger('sbh.suite').name == 'sbh.suite'
    assert get_logger().name == 'sbh'


def test_setup_logger_replaces_handlers(tmp_path):
    log_file = tmp_path / 'logs' / 'run.log'
    setup_logger('sbh.setup_test', 'info')
    logger = setup_logger('sbh.setup_test', 'DEBUG', log_file)
    assert len(logger.handlers) == 2
    assert logger.level == logging.DEBUG
    logger.debug("chain graph built")
    for handler in logger.handlers:
        handler.flush()
    assert 'sbh.setup_test: chain graph built' in log_file.read_text(encoding='utf-8')
    assert len(setup_logger('sbh.setup_test', logging.WARNING).handlers) == 1


def test_setup_logger_rejects_unknown_level():
    with pytest.raises(ValueError, match='loud'):
        setup_logger('sbh.setup_test', 'loud')


def test_suite_progress_lines(caplog):
    logger = logging.getLogger('sbh.progress_test')
    logger.propagate = False
    logger.addHandler(caplog.handler)
    caplog.set_level(logging.INFO, logger='sbh.progress_test')
    report = type('Report', (), {'scenario': 'disk', 'check': 'prop51', 'margin': -0.25,
                                 'notes': ['sup is an estimate']})()
    progress = SuiteProgress(logger)
    progress.scenario(2, 5, 'disk')
    progress.failure(report)
    progress.tally({'pass': 3, 'fail': 1, 'inconclusive': 0})
    messages = [r.getMessage() for r in caplog.records]
    assert messages == ['[ 2/5] disk', 'disk/prop51: margin -2.500e-01 (sup is an estimate)',
                        '[OK] pass: 3, fail: 1']
    logger.removeHandler(caplog.handler)
