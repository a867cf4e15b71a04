"""Logging configuration for the NCCW diagonal engine.

Every module logs through a child of the ``nccw`` logger, so one call to
``setup_logger`` (made by ``main``) decides console level, format and the
optional rotating log file for the whole package.
"""
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

ROOT_LOGGER = "nccw"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(
    name: str = ROOT_LOGGER,
    level: str = "INFO",
    log_format: Optional[str] = None,
    log_file: Optional[str] = None,
    console_level: Optional[str] = None
) -> logging.Logger:
    """Configure the package logger with a console handler and an optional file handler.

    Calling it again replaces the handlers, so a second CLI run in the same
    process picks up its own level and log file.

    Args:
        name: Logger name (the package root unless a caller wants a separate tree)
        level: Level for the file handler
        log_format: Format string (default: timestamp, name, level, message)
        log_file: Optional path; adds a rotating file handler when given
        console_level: Console level (defaults to ``level``)

    Returns:
        The configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)

    formatter = logging.Formatter(log_format or DEFAULT_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, (console_level or level).upper()))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        # 10 MB per file, 5 backups
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(getattr(logging, level.upper()))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """Return the package logger for a module, e.g. ``get_logger(__name__)``.

    ``core.tower`` becomes ``nccw.core.tower``. Until ``setup_logger`` has run,
    the root gets a WARNING console handler so library use stays quiet.
    """
    if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
        name = f"{ROOT_LOGGER}.{name}"
    root = logging.getLogger(ROOT_LOGGER)
    if not root.handlers:
        setup_logger(ROOT_LOGGER, level="WARNING")
    return logging.getLogger(name)
