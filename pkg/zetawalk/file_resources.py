# Copyright (C) 2022  Max Wiklund
#
# Licensed under the Apache License, Version 2.0 (the “License”);
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an “AS IS” BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, TextIO

import numpy as np

FORMATS = ("csv", "json")


@dataclass
class Table:
    """Class representing the columns a command writes, plus run metadata for JSON output."""

    columns: List[str]
    data: List[Sequence[Any]]  # One sequence per column.
    meta: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)  # Scalar results, "# key,value" lines in CSV.

    def __post_init__(self):
        if len(self.columns) != len(self.data):
            raise ValueError(f"Got {len(self.data)} columns of data for {len(self.columns)} names")
        lengths = {len(column) for column in self.data}
        if len(lengths) > 1:
            raise ValueError("All columns must have the same length")

    @property
    def n_rows(self) -> int:
        return len(self.data[0]) if self.data else 0

    def rows(self):
        return zip(*self.data)


def format_value(value: Any) -> str:
    """Render one CSV cell, numbers with 17 significant digits and NaN as a blank cell."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None or math.isnan(value):
        return ""
    return "%.17g" % value


def _json_value(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_csv(table: Table, stream: TextIO) -> None:
    """Write the summary as ``#`` comment lines, then the header and the rows."""
    for key, value in table.summary.items():
        stream.write(f"# {key},{format_value(value)}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows():
        writer.writerow([format_value(value) for value in row])


def write_json(table: Table, stream: TextIO) -> None:
    document = {
        "columns": {name: _json_value(list(column)) for name, column in zip(table.columns, table.data)},
        "meta": _json_value(table.meta),
    }
    if table.summary:
        document["summary"] = _json_value(table.summary)
    json.dump(document, stream, indent=2)
    stream.write("\n")


def output_exists(file_path: str) -> bool:
    return bool(file_path) and os.path.exists(file_path)


def write_table(table: Table, file_path: str = None, fmt: str = "csv", force: bool = False) -> None:
    """Write a table as CSV or JSON.

    Args:
        table: Data to write.
        file_path (optional): Target file, stdout when empty.
        fmt: ``csv`` or ``json``.
        force: Overwrite an existing file instead of failing.

    Raises:
        ValueError: For unknown formats.
        FileExistsError: If the file exists and force is False.

    """
    if fmt not in FORMATS:
        raise ValueError(f"Unknown format {fmt!r}, choose from {', '.join(FORMATS)}")
    writer = write_csv if fmt == "csv" else write_json
    if not file_path:
        writer(table, sys.stdout)
        return

    with open(file_path, "w" if force else "x", encoding="utf-8", newline="") as f:
        writer(table, f)
