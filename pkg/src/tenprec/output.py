"""Result serialization: CSV for curves, JSON for fingerprint + summary.

Both writers are byte-deterministic for deterministic inputs: floats are
formatted with shortest round-trip ``repr``, JSON keys are sorted, and
newlines are written explicitly.
"""
from __future__ import annotations

import json
import numbers

from .experiments import ExperimentResult


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral):
        return str(int(value))
    return repr(float(value))


def render_csv(result: ExperimentResult) -> str:
    lines = [",".join(result.columns)]
    for record in result.records:
        lines.append(",".join(_format_cell(v) for v in record))
    return "\n".join(lines) + "\n"


def render_json(result: ExperimentResult) -> str:
    doc = {
        "kind": result.kind,
        "config_fingerprint": result.fingerprint,
        "seed": result.seed,
        "columns": list(result.columns),
        "records": [list(r) for r in result.records],
        "summary": result.summary,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def emit_results(result: ExperimentResult, fmt: str, path: str) -> None:
    """Write an experiment result to ``path`` in 'csv' or 'json' format."""
    if fmt == "csv":
        text = render_csv(result)
    elif fmt == "json":
        text = render_json(result)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
