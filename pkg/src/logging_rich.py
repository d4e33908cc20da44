"""
Logging for ``plbec`` with a Rich handler on stderr.

Results go to stdout (or ``--output``), so everything logged here stays out of the way of the
JSON/CSV records.
"""

import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

LOGGER_NAME = 'plbec'
DEFAULT_FORMAT = '%(message)s'

console = Console(stderr=True)


class CustomRichHandler(RichHandler):
    """
    Rich handler that colours each log level.

    Numerical warnings (validity of the first-order expansion, regularized divergences) are the
    messages most worth noticing, so they get yellow.
    """

    def __init__(self, **kwargs):
        kwargs.setdefault('console', console)
        super().__init__(**kwargs)

    def emit(self, record):
        # Messages carry config values; only the colour tags below are markup.
        msg = escape(record.getMessage())

        if record.levelno >= logging.ERROR:
            record.msg = f'[red]{msg}[/red]'
        elif record.levelno >= logging.WARNING:
            record.msg = f'[yellow]{msg}[/yellow]'
        elif record.levelno >= logging.INFO:
            record.msg = msg
        else:
            record.msg = f'[dim]{msg}[/dim]'

        # Already interpolated above; leftover args would break the markup.
        record.args = ()

        super().emit(record)


def get_logger(level: int | str = logging.INFO, fmt: str = DEFAULT_FORMAT) -> logging.Logger:
    """
    Set up the ``plbec`` logger with the Rich handler.

    Calling it again reconfigures the same logger (the CLI does this once settings are read).

    :param level: Minimum level to display, as a number or a name like ``'DEBUG'``.
    :param fmt: ``logging`` format string for the message part.
    :returns: Configured logger instance.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    _logger = logging.getLogger(LOGGER_NAME)
    _logger.setLevel(level)
    _logger.handlers.clear()
    handler = CustomRichHandler(
        level=level,
        show_time=False,
        show_level=True,
        show_path=False,
        markup=True,
        rich_tracebacks=False,
    )
    handler.setFormatter(logging.Formatter(fmt=fmt))
    _logger.addHandler(handler)

    # Avoid duplicate output through the root logger.
    _logger.propagate = False

    return _logger


logger = get_logger()
