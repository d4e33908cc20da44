"""
Machine-readable output: one JSON document or a CSV table per command.

Every record echoes the resolved SI inputs and carries a unit for each column. CSV numbers use
scientific notation with 12 significant digits; the inputs go into leading ``#`` comment lines.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import typer

STDOUT = '-'


class OutputFormat(StrEnum):
    JSON = 'json'
    CSV = 'csv'


@dataclass(frozen=True)
class Column:
    name: str
    unit: str = ''

    @property
    def header(self) -> str:
        return f'{self.name} [{self.unit}]' if self.unit else self.name


@dataclass
class Record:
    """
    Output of one command.

    A record with ``table=False`` holds a single row and is written as ``"result"`` in JSON.
    """

    command: str
    inputs: dict[str, Any]
    columns: list[Column]
    rows: list[dict[str, Any]] = field(default_factory=list)
    table: bool = False

    def add(self, **values: Any) -> None:
        unknown = set(values) - {c.name for c in self.columns}
        if unknown:
            raise KeyError(f'Not a column of `{self.command}`: {", ".join(sorted(unknown))}')
        self.rows.append(values)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, StrEnum):
        return value.value
    return value


def format_csv_value(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return f'{value:.11e}'
    return str(value)


def to_json(record: Record) -> str:
    body: dict[str, Any] = {
        'command': record.command,
        'inputs': record.inputs,
        'units': {c.name: c.unit for c in record.columns if c.unit},
    }
    rows = [{c.name: _json_value(row.get(c.name)) for c in record.columns} for row in record.rows]
    if record.table:
        body['rows'] = rows
    else:
        body['result'] = rows[0] if rows else {}
    return json.dumps(body, indent=2) + '\n'


def to_csv(record: Record) -> str:
    buffer = io.StringIO()
    buffer.write(f'# command: {record.command}\n')
    for key, value in record.inputs.items():
        buffer.write(f'# {key}: {json.dumps(value)}\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow([c.header for c in record.columns])
    for row in record.rows:
        writer.writerow([format_csv_value(row.get(c.name)) for c in record.columns])
    return buffer.getvalue()


def render(record: Record, fmt: OutputFormat) -> str:
    return to_json(record) if fmt is OutputFormat.JSON else to_csv(record)


def write(record: Record, fmt: OutputFormat, destination: str | Path = STDOUT) -> None:
    """Write ``record`` to a file, or to stdout for ``-``."""
    text = render(record, fmt)
    if str(destination) == STDOUT:
        typer.echo(text, nl=False)
    else:
        Path(destination).write_text(text, encoding='utf-8')
