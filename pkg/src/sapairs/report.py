"""Machine-readable run reports: JSON lines and plot-ready CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .exact import ARCHIMEDEAN, format_scalar, parse_scalar, scalar_float

TIMING_KEYS = ("elapsed_s", "timings")

CSV_COLUMNS = [
    "index",
    "eps_archimedean",
    "eps_p",
    "found",
    "steps",
    "strategy",
    "x",
    "magnitude_Q_arch",
    "magnitude_L_arch",
    "magnitude_Q_p",
    "magnitude_L_p",
    "eps_archimedean_float",
    "magnitude_Q_arch_float",
    "magnitude_L_arch_float",
    "magnitude_Q_p_float",
    "magnitude_L_p_float",
]


@dataclass
class Report:
    version: str
    digest: str
    mode: str
    config: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    status: str = ""
    exit_code: int = 0
    errors: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def without_timings(self) -> "Report":
        rows = [{k: v for k, v in r.items() if k not in TIMING_KEYS} for r in self.rows]
        return Report(self.version, self.digest, self.mode, dict(self.config), rows, self.status,
                      self.exit_code, list(self.errors), {})


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def emit_jsonl(report: Report) -> str:
    lines = [
        _dump({"kind": "header", "tool": "sapairs", "version": report.version, "digest": report.digest,
               "mode": report.mode, "config": report.config})
    ]
    lines.extend(_dump({"kind": "row", **row}) for row in report.rows)
    lines.append(_dump({"kind": "summary", "status": report.status, "exit_code": report.exit_code,
                        "errors": report.errors, "timings": report.timings}))
    return "\n".join(lines) + "\n"


def parse_jsonl(text: str) -> Report:
    header, rows, summary = None, [], None
    # records end at "\n" only; splitlines() would also break on U+0085 and U+2028 inside strings
    for k, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        kind = obj.pop("kind", None)
        if kind == "header":
            header = obj
        elif kind == "row":
            rows.append(obj)
        elif kind == "summary":
            summary = obj
        else:
            raise ValueError(f"line {k}: unknown record kind {kind!r}")
    if header is None or summary is None:
        raise ValueError("report needs a header and a summary record")
    return Report(header["version"], header["digest"], header["mode"], header.get("config", {}), rows,
                  summary["status"], summary["exit_code"], summary.get("errors", []), summary.get("timings", {}))


def _float_text(s) -> str:
    if s in (None, ""):
        return ""
    return repr(scalar_float(parse_scalar(s)))


def _join_p(d: dict, key=None) -> str:
    parts = []
    for place, v in d.items():
        if place == ARCHIMEDEAN:
            continue
        parts.append(f"{place}={v if key is None else v[key]}")
    return ";".join(parts)


def csv_records(report: Report) -> list:
    out = []
    for row in report.rows:
        if "eps" not in row:
            continue
        eps = row["eps"]
        mags = row.get("magnitudes") or {}
        arch = mags.get(ARCHIMEDEAN, {})
        rec = {
            "index": row.get("index", ""),
            "eps_archimedean": eps.get(ARCHIMEDEAN, ""),
            "eps_p": _join_p(eps),
            "found": "true" if row.get("found") else "false",
            "steps": row.get("steps", ""),
            "strategy": row.get("strategy") or "",
            "x": " ".join(row["x"]) if row.get("x") else "",
            "magnitude_Q_arch": arch.get("Q", ""),
            "magnitude_L_arch": arch.get("L", ""),
            "magnitude_Q_p": _join_p(mags, "Q"),
            "magnitude_L_p": _join_p(mags, "L"),
        }
        rec["eps_archimedean_float"] = _float_text(rec["eps_archimedean"])
        rec["magnitude_Q_arch_float"] = _float_text(rec["magnitude_Q_arch"])
        rec["magnitude_L_arch_float"] = _float_text(rec["magnitude_L_arch"])
        fin = [(p, m) for p, m in mags.items() if p != ARCHIMEDEAN]
        rec["magnitude_Q_p_float"] = ";".join(f"{p}={_float_text(m['Q'])}" for p, m in fin)
        rec["magnitude_L_p_float"] = ";".join(f"{p}={_float_text(m['L'])}" for p, m in fin)
        out.append(rec)
    return out


def emit_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for rec in csv_records(report):
        w.writerow(rec)
    return buf.getvalue()


def emit(report: Report, fmt: str = "json") -> str:
    if fmt in ("json", "jsonl", "json-lines"):
        return emit_jsonl(report)
    if fmt == "csv":
        return emit_csv(report)
    raise ValueError(f"unknown format {fmt!r}")


def search_row(index: int, eps: dict, result, reused: bool = False) -> dict:
    """Report row for one search (or reused witness)."""
    row = {
        "index": index,
        "eps": {str(s): _eps_text(e) for s, e in eps.items()},
        "found": result.found,
        "status": result.status,
        "steps": result.steps,
        "strategy": result.strategy,
        "strategy_steps": dict(result.strategy_steps),
        "reused": reused,
    }
    if result.witness is not None:
        row.update(result.witness.to_dict())
    if result.note:
        row["note"] = result.note
    row["elapsed_s"] = round(result.elapsed, 6)
    return row


def _eps_text(e) -> str:
    if isinstance(e, (tuple, list)):
        return ",".join(format_scalar(x) for x in e)
    return format_scalar(e)
