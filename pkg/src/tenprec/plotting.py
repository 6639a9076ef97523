"""Figure rendering for experiment results (headless Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .experiments import ExperimentResult

_METHOD_ORDER = ("mrt", "tmrt", "zf", "tzf")


def _series(records, key_col: int, x_col: int, y_col: int) -> dict:
    out: dict = {}
    for record in records:
        out.setdefault(record[key_col], ([], []))
        out[record[key_col]][0].append(record[x_col])
        out[record[key_col]][1].append(record[y_col])
    return out


def _plot_subspace(result: ExperimentResult, ax) -> None:
    series = _series(result.records, 1, 0, 2)
    for label, (x, y) in series.items():
        style = "--" if label.startswith("int_") else "-"
        ax.plot(x, y, style, label=label)
    ax.set_xlabel("TTI")
    ax.set_ylabel("squared chordal distance")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="best", fontsize=8)
    ax.set_title("Dominant subspace drift vs. TTI 0")


def _plot_sumrate(result: ExperimentResult, ax) -> None:
    series = _series(result.records, 1, 0, 2)
    for name in sorted(series, key=lambda n: _METHOD_ORDER.index(n)
                       if n in _METHOD_ORDER else len(_METHOD_ORDER)):
        x, y = series[name]
        ax.plot(x, y, label=name.upper())
    ax.set_xlabel("TTI")
    ax.set_ylabel("sum rate [b/s/Hz]")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("Instantaneous sum rate (Monte-Carlo mean)")


def _plot_runtime(result: ExperimentResult, ax) -> None:
    series = _series(result.records, 0, 1, 2)
    for name, (_idx, seconds) in series.items():
        n = len(seconds)
        ax.step(seconds, [(i + 1) / n for i in range(n)], where="post",
                label=name.upper())
    ax.set_xscale("log")
    ax.set_xlabel("per-design runtime [s]")
    ax.set_ylabel("empirical CDF")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("Precoder construction runtime")


def render_figure(result: ExperimentResult, path: str, dpi: int = 150) -> None:
    """Render the figure matching ``result.kind`` and save it to ``path``."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        if result.kind == "subspace":
            _plot_subspace(result, ax)
        elif result.kind == "sumrate":
            _plot_sumrate(result, ax)
        elif result.kind == "runtime":
            _plot_runtime(result, ax)
        else:
            raise ValueError(f"unknown result kind {result.kind!r}")
        fig.tight_layout()
        fig.savefig(path, dpi=dpi)
    finally:
        plt.close(fig)
