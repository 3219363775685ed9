"""Rendering of lattices, kernels and result records as table, CSV or JSON text."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
from collections.abc import Sequence
from typing import Any

import numpy

from .propagator import WignerKernel
from .weyl_transform import WignerFunction

__all__ = [
    "FORMATS",
    "kernel_to_json",
    "record_rows",
    "records_to_csv",
    "records_to_json",
    "render_records",
    "render_table",
    "wigner_to_csv",
    "wigner_to_json",
    "wigner_to_table",
]

FORMATS = ("table", "csv", "json")

_FLOAT_DIGITS = 12


class _ResultEncoder(json.JSONEncoder):
    def default(self, obj: Any) -> Any:
        if isinstance(obj, numpy.ndarray):
            return obj.tolist()

        if isinstance(obj, numpy.generic):
            return obj.item()

        if isinstance(obj, enum.Enum):
            return obj.value

        return super().default(obj)


def _plain(value: Any) -> Any:
    """Flatten enums and tuples into JSON-native values, keeping key order."""
    if isinstance(value, enum.Enum):
        return value.value

    if isinstance(value, (tuple, list)):
        return [_plain(item) for item in value]

    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}

    if isinstance(value, numpy.generic):
        return value.item()

    return value


def record_rows(records: Sequence[Any]) -> list[dict[str, Any]]:
    """
    Turn dataclass records into ordered dicts.

    A field may rename its output key with metadata={"key": ...}.
    """
    rows = []
    for record in records:
        fields = dataclasses.fields(record)
        row = {
            field.metadata.get("key", field.name): getattr(record, field.name)
            for field in fields
        }
        rows.append(_plain(row))

    return rows


def _cell(value: Any) -> str:
    if value is None:
        return ""

    if isinstance(value, float):
        return repr(round(value, _FLOAT_DIGITS))

    if isinstance(value, list):
        return " ".join(_cell(item) for item in value)

    return str(value)


def records_to_json(records: Sequence[Any]) -> str:
    return json.dumps(record_rows(records), cls=_ResultEncoder, indent=2)


def records_to_csv(records: Sequence[Any]) -> str:
    rows = record_rows(records)
    if not rows:
        return ""

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(value) for key, value in row.items()})

    return buffer.getvalue()


def render_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Render a left-aligned plain-text table."""
    cells = [[_cell(value) for value in row] for row in rows]
    widths = [
        max([len(header)] + [len(row[column]) for row in cells])
        for column, header in enumerate(headers)
    ]

    lines = [
        "  ".join(header.ljust(width) for header, width in zip(headers, widths)),
        "  ".join("-" * width for width in widths),
    ]
    for row in cells:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)))

    return "\n".join(line.rstrip() for line in lines) + "\n"


def render_records(records: Sequence[Any], output_format: str) -> str:
    """
    Render records in one of FORMATS.

    Raises:
        ValueError: For an unknown format.
    """
    if output_format == "json":
        return records_to_json(records) + "\n"

    if output_format == "csv":
        return records_to_csv(records)

    if output_format == "table":
        rows = record_rows(records)
        if not rows:
            return ""
        return render_table(list(rows[0]), [list(row.values()) for row in rows])

    raise ValueError(f"Unknown output format {output_format!r}; use one of {FORMATS}.")


def _coordinate_headers(n_qudits: int) -> list[str]:
    return [f"{axis}{q}" for q in range(1, n_qudits + 1) for axis in ("m", "n")]


def wigner_to_csv(wigner: WignerFunction) -> str:
    """Header m1,n1,...,value and one row per lattice point in flat order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_coordinate_headers(wigner.n_qudits) + ["value"])

    points = wigner.lattice.points
    for point, value in zip(points.tolist(), wigner.values.tolist()):
        writer.writerow([*point, _cell(float(value))])

    return buffer.getvalue()


def wigner_to_json(wigner: WignerFunction) -> str:
    payload = {
        "dim": wigner.dim.d,
        "n_qudits": wigner.n_qudits,
        "values": wigner.values,
    }
    return json.dumps(payload, cls=_ResultEncoder)


def wigner_to_table(wigner: WignerFunction) -> str:
    """One qudit as a grid with m down and n across; composites as rows."""
    if wigner.n_qudits == 1:
        grid = wigner.grid()
        headers = ["m\\n"] + [str(n) for n in range(wigner.dim.d)]
        rows = [[m, *grid[m].tolist()] for m in range(wigner.dim.d)]
        return render_table(headers, rows)

    headers = _coordinate_headers(wigner.n_qudits) + ["value"]
    rows = [
        [*point, value]
        for point, value in zip(wigner.lattice.points.tolist(), wigner.values.tolist())
    ]
    return render_table(headers, rows)


def kernel_to_json(kernel: WignerKernel) -> str:
    payload = {
        "dim": kernel.dim.d,
        "n_qudits": kernel.n_qudits,
        "entries": kernel.entries,
    }
    return json.dumps(payload, cls=_ResultEncoder)
