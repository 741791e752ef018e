"""Audit report assembly and serialization.

The JSON document is the single contract (``report_version`` 1); the CSV
files are flat views of parts of it.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import DataTable
from .fru import Level1Report, Level2Report, SweepGrid
from .stats.association import CorrelationEntry
from .stats.fairness import BaselineMetrics
from .stats.scenarios import ScenarioCell

REPORT_VERSION = 1
PRECISION = 12


@dataclass
class AuditResult:
    table: DataTable
    level1: Level1Report
    correlations: list[CorrelationEntry]
    scenarios: list[ScenarioCell]
    level2: list[Level2Report] = field(default_factory=list)
    baseline: dict[str, BaselineMetrics] = field(default_factory=dict)
    individual: dict[str, tuple[float, float]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        t = self.table
        return {
            "report_version": REPORT_VERSION,
            "dataset": {
                "n_instances": t.n_instances,
                "n_features": t.n_features,
                "classes": list(t.class_labels),
                "features": [
                    {"index": i, "name": f.name, "kind": f.kind.value, "protected": f.protected}
                    for i, f in enumerate(t.schema)
                ],
            },
            "level1": self.level1.as_dict(PRECISION),
            "correlations": [e.as_dict(t) for e in self.correlations],
            "scenarios": [s.as_dict(t) for s in self.scenarios],
            "level2": [r.as_dict(PRECISION) for r in self.level2],
            "baseline": {
                "group": {name: m.as_dict() for name, m in self.baseline.items()},
                "individual": {
                    name: {"consistency": _r(c), "gei": _r(g)} for name, (c, g) in self.individual.items()
                },
            },
        }


def _r(value):
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return None
    return round(float(value), PRECISION)


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def write_json(path: str | os.PathLike, document: dict) -> None:
    Path(path).write_text(dumps(document), encoding="utf-8")


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def feature_table(audit: AuditResult) -> tuple[list[str], list[list]]:
    """Rows of the per-feature table: correlations with each protected feature, FRU and ratio."""
    t = audit.table
    protected = sorted({e.protected for e in audit.correlations})
    corr = {(e.protected, e.unprotected): e for e in audit.correlations}
    header = ["idx", "feature"]
    for p in protected:
        name = t.schema[p].name
        header += [f"corr_with_{name}", f"method_with_{name}", f"significant_with_{name}"]
    header += ["fru", "fru_ratio", "relative_to_sum"]
    rows = []
    for r in audit.level1.results:
        row = [r.feature, r.name]
        for p in protected:
            e = corr.get((p, r.feature))
            row += [None, None, None] if e is None else [_r(e.value), e.method.value, int(e.significant)]
        row += [_r(r.aggregate), _r(r.relative_to_reference), _r(r.relative_to_sum)]
        rows.append(row)
    return header, rows


def write_csv_tables(out_dir: str | os.PathLike, audit: AuditResult) -> list[Path]:
    out = Path(out_dir)
    written = []
    header, rows = feature_table(audit)
    _write_rows(out / "features.csv", header, rows)
    written.append(out / "features.csv")

    k = audit.table.n_classes
    labels = audit.table.class_labels
    _write_rows(
        out / "level1.csv",
        ["feature", "name", "aggregate", *[f"fru_class_{labels[c]}" for c in range(k)],
         "relative_to_reference", "relative_to_sum"],
        ([r.feature, r.name, _r(r.aggregate), *[_r(v) for v in r.per_class],
          _r(r.relative_to_reference), _r(r.relative_to_sum)] for r in audit.level1.results),
    )
    written.append(out / "level1.csv")

    t = audit.table
    _write_rows(
        out / "correlations.csv",
        ["protected", "unprotected", "method", "value", "significant", "p_value_or_fstat"],
        ([t.schema[e.protected].name, t.schema[e.unprotected].name, e.method.value, _r(e.value),
          int(e.significant), _r(e.p_value_or_fstat)] for e in audit.correlations),
    )
    written.append(out / "correlations.csv")

    if audit.level2:
        _write_rows(
            out / "level2.csv",
            ["protected", "feature", "name", "aggregate", "relative_to_reference"],
            ([rep.protected_name, r.feature, r.name, _r(r.aggregate), _r(r.relative_to_reference)]
             for rep in audit.level2 for r in rep.results),
        )
        written.append(out / "level2.csv")
    return written


def write_sweep_csv(path: str | os.PathLike, grid: SweepGrid, class_labels=None) -> int:
    rows = grid.rows(class_labels)
    if not rows:
        return 0
    header = list(rows[0])
    _write_rows(path, header, ([_r(v) if isinstance(v, float) else v for v in row.values()] for row in rows))
    return len(rows)


def format_summary(audit: AuditResult) -> str:
    """Plain-text version of the per-feature table plus scenario verdicts."""
    header, rows = feature_table(audit)
    t = audit.table
    protected = sorted({e.protected for e in audit.correlations})
    cols = ["Idx", "Feature"] + [f"Corr {t.schema[p].name}" for p in protected] + ["FRU", "Ratio"]
    lines = []
    body = []
    for row in rows:
        cells = [f"f{row[0] + 1}", row[1]]
        pos = 2
        for _ in protected:
            value, _method, sig = row[pos:pos + 3]
            cells.append("" if value is None else f"{value:.2f}{'*' if sig else ''}")
            pos += 3
        fru, ratio = row[pos], row[pos + 1]
        cells += ["n/a" if fru is None else f"{fru:.2f}", "n/a" if ratio is None else f"{ratio:.2f}"]
        body.append(cells)
    widths = [max(len(str(c)) for c in col) for col in zip(cols, *body)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines.append(fmt.format(*cols))
    lines.append("  ".join("-" * w for w in widths))
    for cells in body:
        lines.append(fmt.format(*cells))
    ref = audit.level1.reference_feature
    lines.append("")
    lines.append(f"reference feature: {t.schema[ref].name if ref is not None else 'none (all FRU zero)'}")
    for s in audit.scenarios:
        ev = ""
        if s.evidence is not None:
            ev = f"; strongest significant correlation: {t.schema[s.evidence.unprotected].name} ({s.evidence.value:.2f})"
        lines.append(
            f"{s.protected_name}: {s.label.value} (relative FRU {s.relative_fru:.2f} {s.fru_magnitude}, "
            f"correlation {s.correlation_strength}{ev})"
        )
    return "\n".join(lines)
