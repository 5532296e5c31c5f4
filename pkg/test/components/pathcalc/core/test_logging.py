"""Tests for structured logging module."""

import logging
from unittest.mock import MagicMock

import pytest
from pathcalc.core.common.logging import StructuredLogger, configure_logging, get_logger


class TestGetLogger:
    """Tests for get_logger function."""

    def test_prefixes_package_name(self) -> None:
        """Module names are placed under the pathcalc hierarchy."""
        logger = get_logger("test_module")

        assert isinstance(logger, logging.Logger)
        assert logger.name == "pathcalc.test_module"

    def test_keeps_package_names(self) -> None:
        """Names already inside the hierarchy are not prefixed twice."""
        assert get_logger("pathcalc.core.paths").name == "pathcalc.core.paths"
        assert get_logger("pathcalc").name == "pathcalc"

    def test_get_logger_caches(self) -> None:
        """Test that get_logger returns same instance."""
        assert get_logger("test") is get_logger("test")


class TestConfigureLogging:
    """Tests for configure_logging."""

    def test_single_handler(self) -> None:
        """Repeated configuration does not stack handlers."""
        root = logging.getLogger("pathcalc")
        before = list(root.handlers)
        try:
            configure_logging("DEBUG")
            configure_logging("WARNING")

            assert len(root.handlers) == max(len(before), 1)
            assert root.level == logging.WARNING
        finally:
            for handler in root.handlers[len(before) :]:
                root.removeHandler(handler)
            root.setLevel(logging.NOTSET)


class TestStructuredLogger:
    """Tests for StructuredLogger class."""

    def test_accepts_name(self) -> None:
        """A module name is resolved through get_logger."""
        logger = StructuredLogger("pathcalc.core.sde")

        assert logger.logger.name == "pathcalc.core.sde"

    def test_format_context_empty(self) -> None:
        """Empty context adds nothing."""
        logger = StructuredLogger(logging.getLogger("test"))

        assert logger._format_context() == ""

    def test_format_context_floats(self) -> None:
        """Floats are rendered with six significant digits."""
        logger = StructuredLogger(logging.getLogger("test"))

        result = logger._format_context(level=3, gap=0.123456789, converged=True)

        assert result == " [level=3, gap=0.123457, converged=True]"

    @pytest.mark.parametrize("method", ["info", "warning", "error"])
    def test_methods_forward_with_context(self, method: str) -> None:
        """Every level forwards the formatted message."""
        base = MagicMock()
        logger = StructuredLogger(base)

        getattr(logger, method)("QV level compared", level=4)

        getattr(base, method).assert_called_once_with("QV level compared [level=4]")

    def test_debug_skipped_when_disabled(self) -> None:
        """Debug messages are not formatted unless DEBUG is enabled."""
        base = MagicMock()
        base.isEnabledFor.return_value = False
        logger = StructuredLogger(base)

        logger.debug("Picard sweep", n=1)

        base.debug.assert_not_called()

    def test_debug_emitted_when_enabled(self) -> None:
        """Debug messages are forwarded when DEBUG is enabled."""
        base = MagicMock()
        base.isEnabledFor.return_value = True
        logger = StructuredLogger(base)

        logger.debug("Picard sweep", n=1)

        base.debug.assert_called_once_with("Picard sweep [n=1]")
