"""Per-run logging utilities with structured logging support."""
import logging
from pathlib import Path
from typing import Dict

import structlog


# Configure structlog for run logging
structlog.configure(
    processors=[
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
        structlog.processors.JSONRenderer(sort_keys=True)
    ],
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    cache_logger_on_first_use=True,
)


class RunLogger:
    """Manages per-run log files with structured logging."""

    _loggers: Dict[str, logging.Logger] = {}

    @classmethod
    def get_logger(cls, run_id: str, log_dir: str = "logs/runs") -> logging.Logger:
        """Get or create a logger for one CLI run.

        Args:
            run_id: Run identifier (derived from the run manifest)
            log_dir: Directory to store run logs

        Returns:
            Logger instance writing to ``<log_dir>/<run_id>.log``
        """
        if run_id in cls._loggers:
            return cls._loggers[run_id]

        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        logger = logging.getLogger(f"run.{run_id}")
        logger.setLevel(logging.DEBUG)
        logger.propagate = False
        logger.handlers.clear()

        file_handler = logging.FileHandler(str(log_path / f"{run_id}.log"))
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter('%(message)s'))
        logger.addHandler(file_handler)

        cls._loggers[run_id] = logger
        return logger

    @classmethod
    def get_structured_logger(cls, run_id: str, log_dir: str = "logs/runs") -> structlog.BoundLogger:
        """Get structured logger bound to the run context."""
        base_logger = cls.get_logger(run_id, log_dir)
        return structlog.wrap_logger(base_logger).bind(run_id=run_id)

    @staticmethod
    def log_run_event(logger, event: str, **kwargs) -> None:
        """Log a run event with additional context.

        Args:
            logger: Bound structured logger
            event: Event name
            **kwargs: Additional context key-value pairs
        """
        logger.info(event, **kwargs)

    @staticmethod
    def log_stage(logger, level: int, counts: Dict[str, int], pi0: int, failed: list) -> None:
        """Log the summary of one built tower stage."""
        logger.info(
            "stage_built",
            level=level,
            total=sum(counts.values()),
            counts=counts,
            pi0=pi0,
            failed_conditions=failed,
        )

    @classmethod
    def close_logger(cls, run_id: str) -> None:
        """Close and remove a run logger."""
        if run_id in cls._loggers:
            logger = cls._loggers.pop(run_id)
            for handler in logger.handlers:
                handler.close()
