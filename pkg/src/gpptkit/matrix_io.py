"""Matrix files: CSV (input) and JSON (input and output).

CSV holds one matrix row per line; entries are bare reals or complex
literals ``a+bi`` / ``a-bi`` / ``bi`` (``j`` is accepted for ``i``).
JSON is ``{"rows", "cols", "entries", "split"?}`` with ``entries`` a flat
row-major list of bare reals or ``[re, im]`` pairs.
"""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from pathlib import Path
from typing import Optional

import numpy as np


class MatrixParseError(ValueError):
    pass


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?P<re>{_NUM})?\s*(?:(?P<sign>[+-])\s*(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*[ij])?$")
_PURE_IM = re.compile(rf"^(?P<im>{_NUM})?\s*[ij]$")


def parse_scalar(text: str) -> complex | float:
    s = text.strip()
    if not s:
        raise MatrixParseError("empty entry")
    m = _PURE_IM.match(s)
    if m:
        im = m.group("im")
        return complex(0.0, float(im) if im else 1.0)
    m = _COMPLEX.match(s)
    if not m or (m.group("re") is None and m.group("sign") is None):
        raise MatrixParseError(f"cannot parse entry {text!r}")
    re_part = float(m.group("re")) if m.group("re") is not None else 0.0
    if m.group("sign") is None:
        return re_part
    im = float(m.group("im")) if m.group("im") is not None else 1.0
    return complex(re_part, -im if m.group("sign") == "-" else im)


def format_scalar(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    if isinstance(x, complex) or np.iscomplexobj(x):
        x = complex(x)
        sign = "-" if np.signbit(x.imag) else "+"
        return f"{x.real:.17g}{sign}{abs(x.imag):.17g}i"
    return f"{float(x):.17g}"


def _finite(m):
    if not np.all(np.isfinite(m)):
        raise MatrixParseError("matrix contains non-finite entries")
    return m


def read_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise MatrixParseError("no rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MatrixParseError("ragged rows")
    vals = [[parse_scalar(c) for c in r] for r in rows]
    cplx = any(isinstance(v, complex) for r in vals for v in r)
    return _finite(np.array(vals, dtype=complex if cplx else float))


def write_csv(m) -> str:
    m = np.atleast_2d(np.asarray(m))
    return "\n".join(",".join(format_scalar(v) for v in row) for row in m) + "\n"


def matrix_to_json(m, split: Optional[int] = None) -> dict:
    m = np.atleast_2d(np.asarray(m))
    if np.iscomplexobj(m):
        entries = [[float(v.real), float(v.imag)] for v in m.ravel()]
    else:
        entries = [float(v) for v in m.ravel()]
    out = {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": entries}
    if split is not None:
        out["split"] = int(split)
    return out


def matrix_from_json(obj) -> tuple[np.ndarray, Optional[int]]:
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixParseError(f"matrix JSON needs rows, cols, entries: {exc}") from None
    if rows < 0 or cols < 0 or len(entries) != rows * cols:
        raise MatrixParseError(f"expected {rows}x{cols} entries, got {len(entries)}")
    cplx = any(isinstance(e, (list, tuple)) for e in entries)
    vals = []
    for e in entries:
        if isinstance(e, (list, tuple)):
            if len(e) != 2:
                raise MatrixParseError("complex entries must be [re, im] pairs")
            vals.append(complex(float(e[0]), float(e[1])))
        elif isinstance(e, (int, float)) and not isinstance(e, bool):
            vals.append(float(e))
        else:
            raise MatrixParseError(f"bad entry {e!r}")
    m = np.array(vals, dtype=complex if cplx else float).reshape(rows, cols)
    split = obj.get("split")
    return _finite(m), (None if split is None else int(split))


def read_matrix(path: str, fmt: Optional[str] = None) -> tuple[np.ndarray, Optional[int]]:
    """Read a matrix file (``-`` for stdin); returns the matrix and an optional split."""
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    if fmt is None:
        fmt = "json" if path.endswith(".json") or text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MatrixParseError(f"invalid JSON: {exc}") from None
        return matrix_from_json(obj)
    if fmt == "csv":
        return read_csv(text), None
    raise MatrixParseError(f"unknown format {fmt!r}")


def write_matrix(path: str, m, split: Optional[int] = None) -> None:
    if path.endswith(".csv"):
        Path(path).write_text(write_csv(m))
    else:
        Path(path).write_text(json.dumps(matrix_to_json(m, split)) + "\n")
