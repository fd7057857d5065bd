"""CSV import/export for metric traces and message logs."""
from __future__ import annotations

import csv
import io
from pathlib import Path

from ..errors import TraceParseError
from ..metrics import MetricsRow, MetricsTrace

BASE_LEVELS = 3


def trace_header(levels: int = BASE_LEVELS) -> list:
    levels = max(levels, BASE_LEVELS)
    return (["period", "alive", "awake"]
            + [f"theta{k}" for k in range(1, levels + 1)]
            + [f"theta_p{k}" for k in range(1, levels + 1)]
            + ["messages"])


def format_trace_csv(trace: MetricsTrace) -> str:
    levels = max(trace.levels, BASE_LEVELS)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trace_header(levels))
    for r in trace.rows:
        w.writerow([r.period, r.alive, r.awake]
                   + [f"{v:.6f}" for v in r.theta]
                   + [f"{v:.6f}" for v in r.theta_prime]
                   + [r.messages])
    return buf.getvalue()


def write_trace_csv(trace: MetricsTrace, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_trace_csv(trace))
    return path


def parse_trace_csv(text: str, path="<string>") -> MetricsTrace:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TraceParseError(path, 1, "empty file") from None
    n = sum(1 for h in header if h.startswith("theta") and not h.startswith("theta_p"))
    if n < BASE_LEVELS or header != trace_header(n):
        raise TraceParseError(path, 1, f"unexpected header {','.join(header)}")
    rows = []
    for lineno, fields in enumerate(reader, start=2):
        if len(fields) != len(header):
            raise TraceParseError(path, lineno, f"expected {len(header)} fields, got {len(fields)}")
        try:
            period, alive, awake = (int(x) for x in fields[:3])
            theta = tuple(float(x) for x in fields[3:3 + n])
            theta_p = tuple(float(x) for x in fields[3 + n:3 + 2 * n])
            rows.append(MetricsRow(period, alive, awake, theta, theta_p, int(fields[-1])))
        except ValueError as exc:
            raise TraceParseError(path, lineno, str(exc)) from None
    return MetricsTrace(rows)


def read_trace_csv(path) -> MetricsTrace:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_trace_csv(fh.read(), path)


def write_message_log(entries, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", "time", "kind", "sender", "receivers"])
        for e in entries:
            w.writerow([e.period, f"{e.time:.6f}", e.kind.value, e.sender, e.receivers])
    return path
