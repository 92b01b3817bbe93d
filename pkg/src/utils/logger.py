"""
Logging Utilities
One "sbh" logger tree for the verifier: module loggers sbh.<module> feed the
handlers the CLI attaches to "sbh", and suite progress goes through
SuiteProgress.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Mapping, Optional, Union

ROOT = "sbh"

_BRIEF = logging.Formatter(fmt='%(asctime)s [%(levelname)s] %(message)s', datefmt='%H:%M:%S')
_DETAILED = logging.Formatter(fmt='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
                              datefmt='%H:%M:%S')


def setup_logger(
    name: str = ROOT,
    level: Union[int, str] = logging.INFO,
    log_file: Optional[Union[str, Path]] = None
) -> logging.Logger:
    """
    Attach console (and optionally file) handlers to a logger of the tree.

    Calling it again replaces the handlers, so repeated CLI runs in one
    process never print a line twice. At DEBUG the module name is shown, so
    estimator traces (sbh.harnack, sbh.walk, ...) can be told apart.

    Args:
        name: Logger name
        level: Logging level or its name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to log file

    Returns:
        Configured logger instance

    Raises:
        ValueError: If level is an unknown level name
    """
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"unknown log level '{level}'")
        level = resolved

    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = _DETAILED if level <= logging.DEBUG else _BRIEF
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(_DETAILED)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str = ROOT) -> logging.Logger:
    """
    Logger in the "sbh" tree; dotted module paths keep their last component.

    Args:
        name: Logger or module name

    Returns:
        Logger instance
    """
    if name != ROOT and not name.startswith(ROOT + "."):
        name = f"{ROOT}.{name.split('.')[-1]}"
    return logging.getLogger(name)


class SuiteProgress:
    """Progress lines for a suite run: scenarios, failed checks and the verdict tally."""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or get_logger()

    def scenario(self, current: int, total: int, name: str):
        self.logger.info(f"[{current:2d}/{total}] {name}")

    def failure(self, report: Any):
        notes = "; ".join(report.notes) or "no notes"
        self.logger.error(f"{report.scenario}/{report.check}: margin {report.margin:.3e} ({notes})")

    def tally(self, counts: Mapping[str, int]):
        self.logger.info("[OK] " + ", ".join(f"{v}: {n}" for v, n in counts.items() if n))
