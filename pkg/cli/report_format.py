"""
Report Format Module
JSON, table and Graphviz output for reports and census rows.
"""

import json
import logging
import os
import subprocess
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from census_engine import CensusRow, GroupSummary
from perm_core import format_label
from topology import Classification, JanuarialReport

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ("p", "k", "l", "theta", "type", "h", "g1", "g2", "alpha", "genus", "status")


def dump_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def _h_text(report: JanuarialReport) -> str:
    return str(report.h1) if report.is_simple else f"{report.h1},{report.h2}"


def _row_cells(report: JanuarialReport) -> List[str]:
    status = "ok" if all(report.checks.values()) else "FAIL"
    return [
        "" if report.p is None else str(report.p),
        str(report.k),
        str(report.ell),
        "" if report.theta is None else str(report.theta),
        report.type,
        _h_text(report),
        str(report.g1),
        str(report.g2),
        str(report.alpha),
        str(report.genus),
        status,
    ]


def format_table(reports: Sequence[JanuarialReport],
                 summaries: Optional[Sequence[GroupSummary]] = None) -> str:
    """Fixed-width table, one line per report, then the group summaries."""
    rows = [list(TABLE_COLUMNS)] + [_row_cells(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    if summaries:
        lines.append("")
        for s in summaries:
            mark = "ok" if s.conserved else "FAIL"
            lines.append(f"p={s.p} k={s.k}: g_pk={s.g_pk} rows={s.rows} simple={s.simple} "
                         f"general={s.general} sum={s.conserved_sum} [{mark}]")
    return "\n".join(lines) + "\n"


def rows_json(rows: Iterable[CensusRow], summaries: Optional[Sequence[GroupSummary]] = None) -> str:
    data = {"rows": [r.to_dict() for r in rows]}
    if summaries is not None:
        data["summary"] = [s.to_dict() for s in summaries]
    return dump_json(data)


def companion_dot(result: Classification, name: str = "companion") -> str:
    """
    Graphviz text for the companion graph.

    Common edges are drawn bold red; both circuit partitions are listed in
    comments.
    """
    comp = result.companion
    report = result.report
    lines = [f"// {report.signature()} genus={report.genus} alpha={report.alpha}"]
    for family in ("P1", "P2"):
        for i, circuit in enumerate(report.circuits.get(family, [])):
            lines.append(f"// {family}[{i}]: {' '.join(circuit)}")
    lines.append(f"graph {name} {{")
    lines.append("  node [shape=box, fontsize=10];")
    for vid, cycle in enumerate(comp.vertices):
        label = "(" + ",".join(format_label(z) for z in cycle) + ")"
        lines.append(f'  v{vid} [label="{label}"];')
    for i, (u, w) in enumerate(comp.edges):
        a, b = comp.endpoints(i)
        style = ' color=red, style=bold,' if i in result.upsilon.edges else ""
        lines.append(f'  v{a} -- v{b} [{style} label="{format_label(u)}-{format_label(w)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(text: str, target: str) -> str:
    """
    Write DOT text; a ``.svg`` target is rendered with graphviz.

    Returns:
        Path of the file actually produced (the .dot file when graphviz
        is unavailable or fails).
    """
    path = Path(target)
    if path.suffix.lower() != ".svg":
        path.write_text(text, encoding="utf-8")
        return str(path)

    dot_path = path.with_suffix(".dot")
    dot_path.write_text(text, encoding="utf-8")
    try:
        result = subprocess.run(["dot", "-Tsvg", str(dot_path), "-o", str(path)],
                                capture_output=True, text=True)
        if result.returncode == 0 and os.path.exists(path):
            return str(path)
        logger.warning("SVG conversion failed, kept %s: %s", dot_path, result.stderr.strip())
    except FileNotFoundError:
        logger.warning("graphviz 'dot' not found, kept %s", dot_path)
    except OSError as e:
        logger.warning("SVG conversion failed, kept %s: %s", dot_path, e)
    return str(dot_path)
