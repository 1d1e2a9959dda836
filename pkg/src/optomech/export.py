"""File formats: matrices and sweeps as CSV, reports as JSON and DOT.

Every writer takes a ``snapshot`` dict (resolved parameters and run settings)
and embeds it: as ``#`` comment lines in CSV and DOT, as a ``metadata`` block
in JSON. Floats are written as their shortest round-trip repr so repeated runs
are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .entanglement import EntanglementReport, edge_classes


def _comment_block(snapshot) -> str:
    if not snapshot:
        return ""
    text = json.dumps(snapshot, sort_keys=True, default=_jsonable)
    return f"# {text}\n"


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "value"):
        return obj.value
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def dumps_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_jsonable, allow_nan=False) + "\n"


def _clean(v):
    """NaN becomes ``None`` so JSON stays strict."""
    if isinstance(v, (float, np.floating)) and math.isnan(v):
        return None
    return v


# -- matrices --------------------------------------------------------------------

def matrix_csv(M, header, snapshot=None) -> str:
    buf = io.StringIO()
    buf.write(_comment_block(snapshot))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in np.asarray(M):
        w.writerow(["%.17g" % x for x in row])
    return buf.getvalue()


def read_matrix_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]])


def model_csv(model, which: str, snapshot=None) -> str:
    """Drift (``which='A'``) or diffusion (``'D'``) matrix with quadrature header."""
    return matrix_csv(getattr(model, which), model.ordering, snapshot)


def cm_csv(cm, ordering, snapshot=None) -> str:
    return matrix_csv(cm.V, ordering, snapshot)


def quadrature_ordering(modes) -> list:
    out = []
    for m in modes:
        out += [f"q_{m}", f"p_{m}"] if m.startswith("m") else [f"X_{m}", f"Y_{m}"]
    return out


# -- reports ---------------------------------------------------------------------

def report_dict(report: EntanglementReport, snapshot=None) -> dict:
    out = {
        "labels": list(report.labels),
        "EN": report.EN.tolist(),
        "threshold": report.threshold,
        "edges": [list(e) for e in report.edge_labels()],
        "shape": report.shape_label,
        "pairs": report.observables(),
    }
    if report.groups is not None:
        out["groups"] = list(report.groups)
        out["edge_classes"] = {k: [list(e) for e in v] for k, v in edge_classes(report).items()}
    out["metadata"] = snapshot or {}
    return out


def report_json(report, snapshot=None) -> str:
    return dumps_json(report_dict(report, snapshot))


def report_csv(report, snapshot=None) -> str:
    buf = io.StringIO()
    buf.write(_comment_block(snapshot))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pair", "mode_a", "mode_b", "E_N", "edge"])
    edges = set(report.edges)
    n = len(report.labels)
    for i in range(n):
        for j in range(i + 1, n):
            w.writerow([f"E_{report.labels[i]}_{report.labels[j]}", report.labels[i],
                        report.labels[j], _cell(report.EN[i, j]), int((i, j) in edges)])
    return buf.getvalue()


_EDGE_COLOURS = {"red": "red", "blue": "blue", "green": "darkgreen", "far": "gray"}


def report_dot(report: EntanglementReport, snapshot=None) -> str:
    lines = [_comment_block(snapshot).rstrip("\n")] if snapshot else []
    lines += ["graph entanglement {", f'  label="{report.shape_label}";']
    for lab in report.labels:
        lines.append(f'  "{lab}";')
    colour = {}
    if report.groups is not None:
        for cls, edges in edge_classes(report).items():
            for e in edges:
                colour[e] = _EDGE_COLOURS[cls]
    for i, j in report.edges:
        a, b = report.labels[i], report.labels[j]
        attrs = f'label="{report.EN[i, j]:.6g}"'
        if (a, b) in colour:
            attrs += f", color={colour[(a, b)]}"
        lines.append(f'  "{a}" -- "{b}" [{attrs}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- sweeps ----------------------------------------------------------------------

def sweep_csv(result) -> str:
    buf = io.StringIO()
    buf.write(_comment_block(result.metadata))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_cell(row[c]) for c in result.columns])
    return buf.getvalue()


def sweep_json(result) -> str:
    return dumps_json({
        "metadata": result.metadata,
        "columns": result.columns,
        "rows": [[_clean(row[c]) for c in result.columns] for row in result.rows],
    })


def read_sweep_csv(text: str):
    """Columns and rows (as dicts of strings) of a sweep CSV."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return reader.fieldnames, list(reader)


def steady_state_json(ss, snapshot=None) -> str:
    return dumps_json({"steady_state": ss.to_dict(), "metadata": snapshot or {}})
