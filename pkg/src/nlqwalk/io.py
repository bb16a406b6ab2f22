"""CSV/JSON serialisation of series, sweeps and schedules.

Floats are written with ``repr``, the shortest decimal string that parses
back to the same double, so a write/read cycle is bit-exact. CSV files use
a header row, ``.`` decimals and LF line endings; the resolved run
configuration goes to a ``<name>.meta.json`` sidecar next to each CSV.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import ObservableSeries
from .errors import ScheduleError
from .transfer import GSchedule, Segment


def _fmt(x):
    return repr(float(x))


def series_columns(n):
    return ["t"] + [f"p_{j}" for j in range(n)] + ["norm", "energy"]


def meta_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def write_series_csv(series, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(series_columns(series.n))
    for k in range(len(series.times)):
        row = [series.times[k], *series.probs[k], series.norm[k], series.energy[k]]
        w.writerow([_fmt(v) for v in row])


def read_series_csv(fh):
    rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[0] != "t" or header[-2:] != ["norm", "energy"]:
        raise ValueError("not a series CSV: unexpected header")
    data = np.array([[float(v) for v in r] for r in body]).reshape(len(body), len(header))
    return ObservableSeries(
        times=data[:, 0], probs=data[:, 1:-2], norm=data[:, -2], energy=data[:, -1]
    )


def series_to_dict(series, config=None):
    return {
        "config": config if config is not None else series.meta,
        "columns": series_columns(series.n),
        "t": series.times.tolist(),
        "probs": series.probs.tolist(),
        "norm": series.norm.tolist(),
        "energy": series.energy.tolist(),
    }


def series_from_dict(d):
    return ObservableSeries(
        times=np.asarray(d["t"], dtype=float),
        probs=np.asarray(d["probs"], dtype=float).reshape(len(d["t"]), -1),
        norm=np.asarray(d["norm"], dtype=float),
        energy=np.asarray(d["energy"], dtype=float),
        meta=d.get("config", {}),
    )


def write_series(series, path, fmt="csv", config=None):
    """Write ``series`` to ``path`` and echo the configuration alongside it."""
    path = Path(path)
    config = config if config is not None else series.meta
    if fmt == "json":
        path.write_text(json.dumps(series_to_dict(series, config)) + "\n")
        return
    with path.open("w", newline="") as fh:
        write_series_csv(series, fh)
    meta_path(path).write_text(json.dumps(config, indent=2) + "\n")


def read_series(path):
    path = Path(path)
    if path.suffix == ".json":
        return series_from_dict(json.loads(path.read_text()))
    with path.open(newline="") as fh:
        series = read_series_csv(fh)
    mp = meta_path(path)
    if mp.exists():
        series.meta = json.loads(mp.read_text())
    return series


def write_sweep(points, path, fmt="csv", config=None):
    path = Path(path)
    config = config or {}
    if fmt == "json":
        doc = {
            "config": config,
            "columns": ["g", "p_bar"],
            "rows": [[p[0], p[1]] for p in points],
            "errors": [p[2] for p in points if len(p) > 2 and p[2]],
        }
        path.write_text(json.dumps(doc) + "\n")
        return
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["g", "p_bar"])
        for p in points:
            w.writerow([_fmt(p[0]), _fmt(p[1])])
    meta_path(path).write_text(json.dumps(config, indent=2) + "\n")


def read_sweep_csv(path):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["g", "p_bar"]:
        raise ValueError("not a sweep CSV")
    return [(float(g), float(p)) for g, p in rows[1:]]


def _line_of(text, pos):
    return text.count("\n", 0, pos) + 1


def parse_schedule(text):
    """Parse a JSON array of ``{"t_start", "t_end", "g"}`` objects.

    Errors carry the 1-based line number of the offending entry.
    """
    decoder = json.JSONDecoder()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, list):
        raise ScheduleError("line 1: schedule must be a JSON array")

    # second pass to find where each element starts
    starts = []
    pos = text.index("[") + 1
    for _ in doc:
        while text[pos] in " \t\r\n,":
            pos += 1
        starts.append(pos)
        _, pos = decoder.raw_decode(text, pos)

    segments = []
    for i, (entry, at) in enumerate(zip(doc, starts)):
        line = _line_of(text, at)
        if not isinstance(entry, dict) or set(entry) != {"t_start", "t_end", "g"}:
            raise ScheduleError(f"line {line}: entry {i} must have exactly keys t_start, t_end, g")
        try:
            segments.append(Segment(float(entry["t_start"]), float(entry["t_end"]), float(entry["g"])))
        except (TypeError, ValueError):
            raise ScheduleError(f"line {line}: entry {i} has non-numeric values") from None
    try:
        return GSchedule(tuple(segments))
    except ScheduleError as exc:
        msg = str(exc)
        if msg.startswith("segment "):
            idx = int(msg.split()[1].rstrip(":"))
            raise ScheduleError(f"line {_line_of(text, starts[idx])}: {msg}") from None
        raise


def load_schedule(path):
    return parse_schedule(Path(path).read_text())


def dump_schedule(schedule, path):
    Path(path).write_text(json.dumps(schedule.to_records(), indent=2) + "\n")
