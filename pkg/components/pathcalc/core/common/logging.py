"""Logging configuration for pathcalc.

Provides structured logging with experiment context.
"""

import logging

_ROOT = "pathcalc"
_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"

ContextValue = str | int | float | bool | None


def configure_logging(level: int | str = logging.INFO) -> None:
    """Attach a stream handler to the pathcalc logger hierarchy.

    Library modules never call this; the CLI does once at startup.

    Args:
        level: Logging level name or number
    """
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
        root.addHandler(handler)
    root.setLevel(level)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a module.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger below the ``pathcalc`` hierarchy
    """
    if name == _ROOT or name.startswith(f"{_ROOT}."):
        return logging.getLogger(name)
    return logging.getLogger(f"{_ROOT}.{name}")


class StructuredLogger:
    """Logger wrapper that adds structured context to log messages."""

    def __init__(self, logger: logging.Logger | str):
        """Initialize with a logger instance or a module name.

        Args:
            logger: Base logger to wrap, or a name passed to ``get_logger``
        """
        self.logger = get_logger(logger) if isinstance(logger, str) else logger

    def _format_context(self, **context: ContextValue) -> str:
        if not context:
            return ""
        items = [f"{k}={_render(v)}" for k, v in context.items()]
        return f" [{', '.join(items)}]"

    def info(self, message: str, **context: ContextValue) -> None:
        """Log info message with context."""
        self.logger.info(f"{message}{self._format_context(**context)}")

    def error(self, message: str, **context: ContextValue) -> None:
        """Log error message with context."""
        self.logger.error(f"{message}{self._format_context(**context)}")

    def exception(self, message: str, **context: ContextValue) -> None:
        """Log exception message with context and traceback."""
        self.logger.exception(f"{message}{self._format_context(**context)}")

    def warning(self, message: str, **context: ContextValue) -> None:
        """Log warning message with context."""
        self.logger.warning(f"{message}{self._format_context(**context)}")

    def debug(self, message: str, **context: ContextValue) -> None:
        """Log debug message with context.

        Skips formatting entirely when DEBUG is disabled, since debug lines sit inside
        per-path loops.
        """
        if self.logger.isEnabledFor(logging.DEBUG):
            self.logger.debug(f"{message}{self._format_context(**context)}")


def _render(value: ContextValue) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
