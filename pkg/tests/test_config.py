import logging

import pytest

from config import config
from utils.logger import ROOT_LOGGER, get_logger


@pytest.fixture
def restore_config(monkeypatch):
    yield
    monkeypatch.undo()
    config.load()


class TestConfig:
    def test_defaults(self, restore_config):
        config.load()
        assert config.get('tower.max_depth_conn') == 6
        assert config.get('tower.max_depth_path') == 4
        assert config.get('missing.key', 'fallback') == 'fallback'

    def test_user_file_is_merged(self, tmp_path, restore_config):
        path = tmp_path / "user.yaml"
        path.write_text("tower:\n  max_depth_path: 3\n")
        config.load(str(path))
        assert config.get('tower.max_depth_path') == 3
        assert config.get('tower.max_depth_conn') == 6

    def test_environment_overrides(self, monkeypatch, restore_config):
        monkeypatch.setenv('NCCW_SEED', '7')
        monkeypatch.setenv('NCCW_LOG_LEVEL', 'debug')
        config.load()
        assert config.cli['default_seed'] == 7
        assert config.logging['level'] == 'DEBUG'

    def test_bad_seed(self, monkeypatch, restore_config):
        monkeypatch.setenv('NCCW_SEED', 'seven')
        with pytest.raises(ValueError, match="NCCW_SEED"):
            config.load()

    def test_overrides_do_not_outlive_their_test(self):
        assert config.cli['default_seed'] == 20240601
        assert config.logging['level'] == 'INFO'


class TestLogger:
    def test_module_loggers_share_the_root(self):
        logger = get_logger("core.tower")
        assert logger.name == f"{ROOT_LOGGER}.core.tower"
        assert logger.parent is logging.getLogger(ROOT_LOGGER)
        assert logging.getLogger(ROOT_LOGGER).handlers
