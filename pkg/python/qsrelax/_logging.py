"""Console logging for the command line."""

from __future__ import annotations

import logging
import sys

from rich.console import Console
from rich.logging import RichHandler

_HANDLER_NAME = "qsrelax-rich"


def level_for(verbosity: int) -> int:
    if verbosity <= 0:
        return logging.WARNING
    if verbosity == 1:
        return logging.INFO
    return logging.DEBUG


def configure_logging(verbosity: int = 0, *, console: Console | None = None) -> logging.Logger:
    """Install one ``RichHandler`` on the package logger, writing to stderr.

    Calling it again replaces the handler instead of stacking a second one.
    """
    logger = logging.getLogger("qsrelax")
    for handler in list(logger.handlers):
        if handler.get_name() == _HANDLER_NAME:
            logger.removeHandler(handler)
    handler = RichHandler(
        console=console or Console(file=sys.stderr),
        show_path=False,
        rich_tracebacks=False,
    )
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level_for(verbosity))
    return logger
