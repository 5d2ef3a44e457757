"""Plain-text matrix files.

The first line holds ``<rows> <cols>``; the remaining lines hold the entries
in row-major order separated by arbitrary whitespace.  Writers emit one row
per line with 17 significant digits, which round-trips binary64 exactly.
"""

from __future__ import annotations

import io
import os
from typing import IO, Iterator, Union

import numpy as np

from .errors import MatrixParseError

PathOrFile = Union[str, os.PathLike, IO[str]]


def _tokens(lines) -> Iterator[tuple[str, int, int]]:
    for lineno, line in enumerate(lines, start=1):
        col = 0
        for tok in line.split():
            col = line.index(tok, col)
            yield tok, lineno, col + 1
            col += len(tok)


def parse_matrix(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise MatrixParseError("missing '<rows> <cols>' header", line=1)
    header = list(_tokens(lines[:1]))
    if len(header) != 2:
        raise MatrixParseError("header must be exactly '<rows> <cols>'", line=1)
    dims = []
    for tok, lineno, col in header:
        try:
            d = int(tok)
        except ValueError:
            raise MatrixParseError(f"bad dimension {tok!r}", lineno, col) from None
        if d <= 0:
            raise MatrixParseError(f"dimension must be positive, got {d}", lineno, col)
        dims.append(d)
    rows, cols = dims
    values = []
    last = (1, 0)
    for tok, lineno, col in _tokens(lines[1:]):
        lineno += 1
        try:
            x = float(tok)
        except ValueError:
            raise MatrixParseError(f"bad number {tok!r}", lineno, col) from None
        if not np.isfinite(x):
            raise MatrixParseError(f"non-finite entry {tok!r}", lineno, col)
        if len(values) == rows * cols:
            raise MatrixParseError(f"more than {rows * cols} entries", lineno, col)
        values.append(x)
        last = (lineno, col)
    if len(values) != rows * cols:
        raise MatrixParseError(
            f"expected {rows * cols} entries, found {len(values)}", line=last[0]
        )
    out = np.array(values, dtype=np.float64).reshape(rows, cols)
    out.setflags(write=False)
    return out


def read_matrix(source: PathOrFile) -> np.ndarray:
    if hasattr(source, "read"):
        return parse_matrix(source.read())
    with open(source, encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def format_matrix(a) -> str:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    buf = io.StringIO()
    buf.write(f"{a.shape[0]} {a.shape[1]}\n")
    for row in a:
        buf.write(" ".join(format(float(x), ".17g") for x in row))
        buf.write("\n")
    return buf.getvalue()


def write_matrix(a, dest: PathOrFile) -> None:
    text = format_matrix(a)
    if hasattr(dest, "write"):
        dest.write(text)
        return
    with open(dest, "w", encoding="utf-8") as fh:
        fh.write(text)
