"""Run report: result tables plus run metadata, written as deterministic
JSON, a CSV bundle and an SVG ranking chart."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .index import EU_AVERAGE, CountryScore, scores_table

# column order of every emitted table
SCHEMAS = {
    "measurement": ["construct", "indicator", "loading", "sample_mean", "sd", "t", "p", "retained"],
    "reliability": ["construct", "alpha", "cr", "rho_a", "ave", "verdict", "reasons"],
    "hypotheses": ["id", "path", "beta", "sd", "t", "p", "expected_sign", "reliability_ok", "result", "reason"],
    "f_square": ["predictor", "target", "f_squared", "classification"],
    "r_squared": ["construct", "r_squared"],
}
DISPLAY_DECIMALS = {"sosdit": 2, "p": 2}
FORMATS = ("json", "csv-bundle", "all")


class ReportError(OSError):
    pass


@dataclass
class RunReport:
    tables: dict[str, list[dict]]
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return dumps({"metadata": self.metadata, "tables": self.tables}) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        return cls(d["tables"], d["metadata"])

    def __eq__(self, other):
        if not isinstance(other, RunReport):
            return NotImplemented
        return self.to_json() == other.to_json()


# -- deterministic JSON -----------------------------------------------------

def _number(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"  # keep floats floats on reload
    return s


def dumps(obj, indent=0) -> str:
    """JSON with floats at 17 significant digits and keys in insertion order.

    Non-finite floats are written as ``NaN`` / ``Infinity``, which the
    standard ``json`` module reads back.
    """
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _number(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- building the report ------------------------------------------------------

def measurement_rows(boot, retained=None, constructs=None) -> list[dict]:
    rows = []
    for p in boot.loadings():
        if constructs is not None and p.source not in constructs:
            continue
        keep = None if retained is None else p.target in retained.get(p.source, [])
        rows.append({"construct": p.source, "indicator": p.target, "loading": p.original,
                     "sample_mean": p.sample_mean, "sd": p.sd, "t": p.t, "p": p.p, "retained": keep})
    return rows


def reliability_rows(rel) -> list[dict]:
    return [{"construct": n, "alpha": c.alpha, "cr": c.cr, "rho_a": c.rho_a, "ave": c.ave,
             "verdict": c.verdict, "reasons": "; ".join(c.reasons)}
            for n, c in rel.constructs.items() if c.n_indicators > 1]


def hypothesis_rows(verdicts) -> list[dict]:
    return [{"id": v.id, "path": v.path, "beta": v.beta, "sd": v.sd, "t": v.t, "p": v.p,
             "expected_sign": v.expected_sign, "reliability_ok": v.reliability_ok,
             "result": v.verdict, "reason": v.reason} for v in verdicts]


def build_report(analysis) -> RunReport:
    spec = analysis.reduced_spec
    targets = {p.target for p in spec.paths} | {i.target for i in spec.interactions}
    hos = {h.name for h in spec.higher_order}
    constructs = {c.name for c in analysis.spec.constructs}
    tables = {
        "measurement": measurement_rows(analysis.full_boot, analysis.retained, constructs),
        "reliability": reliability_rows(analysis.reliability),
        "hypotheses": hypothesis_rows(analysis.verdicts),
        "f_square": [{"predictor": e.predictor, "target": e.target, "f_squared": e.f_squared,
                      "classification": e.classification} for e in analysis.effects.effects],
        "r_squared": [{"construct": k, "r_squared": v} for k, v in analysis.fit.r_squared.items()
                      if k in targets and k not in hos],
        "sosdit": scores_table(analysis.scores),
    }
    return RunReport(tables, dict(analysis.metadata))


# -- writers -------------------------------------------------------------------

def _cell(v, decimals=None) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if not math.isfinite(v):
            return _number(v)
        return repr(v) if decimals is None else f"{v:.{decimals}f}"
    return str(v)


def table_csv(rows: list[dict], columns: list[str], display=False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c), DISPLAY_DECIMALS.get(c, 3) if display else None) for c in columns])
    return buf.getvalue()


def _columns(name, rows):
    if name in SCHEMAS:
        return SCHEMAS[name]
    return list(rows[0]) if rows else ["country", "sosdit", "rank"]


def emit_report(report: RunReport, out_dir, format: str = "all") -> list[Path]:
    """Write ``report.json`` and/or ``tables/<name>.csv`` (full precision)
    plus ``tables/display/<name>.csv`` (rounded). Returns written paths."""
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if format in ("json", "all"):
            p = out / "report.json"
            p.write_text(report.to_json(), encoding="utf-8")
            written.append(p)
        if format in ("csv-bundle", "all"):
            (out / "tables" / "display").mkdir(parents=True, exist_ok=True)
            for name, rows in report.tables.items():
                cols = _columns(name, rows)
                for sub, display in (("", False), ("display", True)):
                    p = out / "tables" / sub / f"{name}.csv"
                    p.write_text(table_csv(rows, cols, display), encoding="utf-8")
                    written.append(p)
    except OSError as exc:
        raise ReportError(f"cannot write report to {out}: {exc}") from exc
    return written


def render_chart(scores: list[CountryScore], path=None, width=640, bar_height=18) -> str:
    """Horizontal bar chart of SOSDIT scores on a 0-1 axis, best first.

    Each country is one ``<rect class="bar">``; the EU average, when
    present, is drawn as a dashed rule. Returns the SVG text and writes it
    to ``path`` if given.
    """
    countries = [s for s in scores if s.country != EU_AVERAGE]
    if not countries:
        raise ValueError("no country scores to chart")
    countries = sorted(countries, key=lambda s: (-s.sosdit, s.country))
    avg = next((s.sosdit for s in scores if s.country == EU_AVERAGE), None)
    left, right, top, gap = 50, 50, 20, 4
    plot = width - left - right
    height = top * 2 + len(countries) * (bar_height + gap)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        "<title>SOSDIT score by country</title>",
    ]
    for i, s in enumerate(countries):
        y = top + i * (bar_height + gap)
        w = max(0.0, min(1.0, s.sosdit)) * plot
        parts.append(f'<text x="{left - 6}" y="{y + bar_height - 5}" text-anchor="end">{escape(s.country)}</text>')
        parts.append(f'<rect class="bar" x="{left}" y="{y}" width="{w:.2f}" height="{bar_height}" fill="#3b6ea5">'
                     f"<title>{escape(s.name)}: {s.sosdit:.2f}</title></rect>")
        parts.append(f'<text x="{left + w + 4:.2f}" y="{y + bar_height - 5}">{s.sosdit:.2f}</text>')
    if avg is not None:
        x = left + max(0.0, min(1.0, avg)) * plot
        parts.append(f'<line class="eu-average" x1="{x:.2f}" y1="{top - 6}" x2="{x:.2f}" y2="{height - top + 6}" '
                     f'stroke="#b03030" stroke-dasharray="4 3"/>')
        parts.append(f'<text x="{x + 3:.2f}" y="{top - 8}" fill="#b03030">EU {avg:.2f}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return svg
