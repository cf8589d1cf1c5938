"""CSV and text output, written atomically (temp file + rename)."""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

# Trace / tabulation tables carry 12 significant digits; sweep tables use the
# shortest round-trip representation.
TRACE = "%.12g"
SHORTEST = "repr"


def format_value(v, fmt: str = SHORTEST) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return repr(f) if fmt == SHORTEST else fmt % f
    return str(v)


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence], fmt: str = SHORTEST) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(format_value(v, fmt) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], fmt: str = SHORTEST) -> Path:
    return atomic_write_text(path, csv_text(header, rows, fmt))


__all__ = ["SHORTEST", "TRACE", "atomic_write_text", "csv_text", "format_value", "write_csv"]
