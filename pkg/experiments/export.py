import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, TextIO

logger = logging.getLogger('experiments.export')


def _cell(value: object) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(columns: Sequence[str], rows: Iterable[Mapping[str, object]],
               header: Optional[Mapping[str, object]] = None) -> str:
    buffer = io.StringIO()
    for key, value in (header or {}).items():
        buffer.write(f"# {key}={value}\n")
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def write_csv(path: Optional[Path], columns: Sequence[str], rows: Iterable[Mapping[str, object]],
              header: Optional[Mapping[str, object]] = None, *, stream: Optional[TextIO] = None) -> str:
    text = render_csv(columns, rows, header)
    if path is None:
        if stream is not None:
            stream.write(text)
        return text

    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding='utf-8')
    logger.info(f"Wrote {path}")
    return text
