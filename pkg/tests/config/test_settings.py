# tests/config/test_settings.py - Settings tests
import pytest
from pydantic import ValidationError

from src.config.logging import get_logging_config
from src.config.settings import Environment, LabSettings


class TestLabSettings:
    def test_defaults(self):
        """Test the default limits"""
        config = LabSettings()
        assert config.MAX_FIELD_ORDER == 2**16
        assert config.MAX_SUBGROUP_GROUP_ORDER == 1000
        assert config.DEFAULT_TOLERANCE == 1e-9

    def test_output_path(self):
        """Test that OUTPUT_DIR becomes the report directory path"""
        assert LabSettings(OUTPUT_DIR="out/runs").output_path.parts == ("out", "runs")

    @pytest.mark.parametrize("field, value", [("N_JOBS", 0), ("DEFAULT_TOLERANCE", 0.0), ("SUM_BLOCK_SIZE", -1)])
    def test_invalid_values(self, field, value):
        """Test that invalid limits are rejected"""
        with pytest.raises(ValidationError):
            LabSettings(**{field: value})

    def test_environment_helpers(self):
        """Test the environment flags"""
        config = LabSettings(ENVIRONMENT=Environment.PRODUCTION)
        assert config.is_production
        assert not LabSettings(ENVIRONMENT=Environment.DEVELOPMENT).is_production


class TestLoggingConfig:
    def test_console_handler_on_stderr(self):
        """Test that log output never mixes with stdout reports"""
        config = get_logging_config("DEBUG")
        assert config["handlers"]["console"]["stream"] == "ext://sys.stderr"
        assert config["loggers"][""]["level"] == "DEBUG"
