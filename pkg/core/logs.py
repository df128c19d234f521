import logging
import sys
from typing import Optional, TextIO

FORMAT = '[{asctime}] [{levelname:<8}] {name}: {message}'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def level_from_verbosity(verbosity: int) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def setup_logging(level: int = logging.WARNING, *, stream: Optional[TextIO] = None) -> None:
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(logging.Formatter(FORMAT, DATE_FORMAT, style='{'))
    root = logging.getLogger()
    for existing in [*root.handlers]:
        if getattr(existing, '_recagt', False):
            root.removeHandler(existing)
    handler._recagt = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(level)
