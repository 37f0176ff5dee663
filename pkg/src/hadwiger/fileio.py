"""Plain-text configuration files, run-config hashing and table output.

Configuration file layout::

    hexconfig v1 width=6 height=6 wrap=xy
    010010
    ...

One line per row ``j = 0 .. height-1``; character ``i`` of a row is face
``(i, j)``.  Only fully periodic hosts (``wrap=xy``) exist.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import HadwigerError
from .functionals import Configuration
from .hexlattice import make_torus

FORMAT_VERSION = 1
_HEADER = re.compile(r"^hexconfig v(\d+) width=(\d+) height=(\d+) wrap=(\w+)$")


class ConfigFileError(HadwigerError):
    pass


def dumps_configuration(config: Configuration) -> str:
    t = config.lattice
    vals = np.asarray(config.values).reshape(t.height, t.width)
    lines = [f"hexconfig v{FORMAT_VERSION} width={t.width} height={t.height} wrap=xy"]
    lines += ["".join("1" if v else "0" for v in row) for row in vals]
    return "\n".join(lines) + "\n"


def loads_configuration(text: str) -> Configuration:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise ConfigFileError("empty configuration file")
    m = _HEADER.match(lines[0])
    if not m:
        raise ConfigFileError(f"bad header line {lines[0]!r}")
    version, width, height, wrap = int(m[1]), int(m[2]), int(m[3]), m[4]
    if version != FORMAT_VERSION:
        raise ConfigFileError(f"unsupported configuration format version {version}")
    if wrap != "xy":
        raise ConfigFileError(f"only periodic hosts (wrap=xy) are supported, got wrap={wrap}")
    rows = lines[1:]
    if len(rows) != height:
        raise ConfigFileError(f"expected {height} rows, found {len(rows)}")
    for j, row in enumerate(rows):
        if len(row) != width or set(row) - {"0", "1"}:
            raise ConfigFileError(f"row {j} must be {width} characters of 0/1, got {row!r}")
    vals = np.array([[c == "1" for c in row] for row in rows], dtype=np.uint8).reshape(-1)
    try:
        host = make_torus(width, height)
    except HadwigerError as exc:
        raise ConfigFileError(f"bad lattice in header: {exc}") from None
    return Configuration(host, vals)


def read_configuration(path) -> Configuration:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigFileError(f"cannot read {path}: {exc.strerror}") from None
    return loads_configuration(text)


def write_configuration(path, config: Configuration) -> None:
    Path(path).write_text(dumps_configuration(config))


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(data: Mapping) -> str:
    return hashlib.sha256(canonical_json(data).encode()).hexdigest()


def _clean(obj):
    """Replace non-finite floats by ``None`` so output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(_clean(data), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def csv_text(rows: Iterable[Mapping], columns: list[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv(path, rows: Iterable[Mapping], columns: list[str] | None = None) -> None:
    Path(path).write_text(csv_text(rows, columns))


def write_columns_csv(path, columns: Mapping[str, np.ndarray]) -> None:
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    rows = ({k: columns[k][i] for k in names} for i in range(n))
    write_csv(path, rows, names)
