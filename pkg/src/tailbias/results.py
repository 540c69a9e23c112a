"""Column-oriented result tables and their JSON / CSV serialization."""
from dataclasses import dataclass, field
import csv
import io
import json
import math
import os
import sys

from . import __version__

__all__ = ["INFINITE", "ResultTable", "make_meta", "emit", "dumps", "read_table"]

INFINITE = "infinite"


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".17g")


def _parse(s):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def _plain(v):
    """numpy scalars -> python scalars, non-finite floats -> strings."""
    if isinstance(v, str):
        return v
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return INFINITE if v > 0 else repr(v)
    return v


@dataclass
class ResultTable:
    columns: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = {str(k): [_plain(v) for v in vals] for k, vals in self.columns.items()}
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")

    def __len__(self):
        return len(next(iter(self.columns.values()), []))

    def rows(self):
        names = list(self.columns)
        return [dict(zip(names, r)) for r in zip(*self.columns.values())]


def make_meta(command, params, seed=None):
    """Metadata block.  The timestamp is only set when SOURCE_DATE_EPOCH is,
    so that re-running a command reproduces its output byte for byte."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    stamp = None
    if epoch is not None:
        from datetime import datetime, timezone
        stamp = datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return {
        "command": command,
        "params": dict(params),
        "seed": seed,
        "version": __version__,
        "timestamp": stamp,
    }


def dumps(table, fmt):
    if fmt == "json":
        doc = {"meta": table.meta, "data": table.columns}
        return json.dumps(doc, sort_keys=False, indent=1, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("# meta: " + json.dumps(table.meta, sort_keys=True, allow_nan=False) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(table.columns))
        for row in zip(*table.columns.values()):
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit(table, fmt, path=None):
    """Write ``table`` as json or csv to ``path`` (stdout when None).

    I/O failures are re-raised as OSError naming the path.
    """
    text = dumps(table, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_table(path):
    """Parse a file written by `emit` back into a `ResultTable`."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return ResultTable(doc["data"], doc["meta"])
    lines = text.splitlines()
    meta = {}
    if lines and lines[0].startswith("# meta: "):
        meta = json.loads(lines[0][len("# meta: "):])
        lines = lines[1:]
    reader = csv.reader(lines)
    header = next(reader, [])
    cols = {h: [] for h in header}
    for row in reader:
        for h, v in zip(header, row):
            cols[h].append(_parse(v))
    return ResultTable(cols, meta)
