"""Deterministic delimited reports with verdict footers.

Every experiment emits the same shape: a `# schema=1` preamble, a header
row, data rows, and `# key=value` footer lines carrying the verdicts the
exit code is derived from.  All floats render through one %.12g formatter
and the configuration hash covers the semantically relevant inputs (never
the output path), so identical invocations produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1

_DELIMITERS = {"csv": ",", "tsv": "\t"}


def format_value(v) -> str:
    """Canonical cell rendering: %.12g floats, plain ints, str pass-through."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.12g}"
    return str(v)


def config_digest(config: dict) -> str:
    """Short stable hash of a configuration mapping.

    The mapping must be JSON-serializable; insertion order is irrelevant.
    Output paths must not be included by callers.
    """
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("ascii")).hexdigest()[:12]


def file_digest(path) -> str:
    """Short sha256 of a file's bytes, for pinning input tables."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:12]


@dataclass
class Report:
    """One experiment's output: rows plus verdict footer."""

    command: str
    columns: list[str]
    config: dict
    rows: list[tuple] = field(default_factory=list)
    verdicts: dict[str, bool] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def add_row(self, *cells) -> None:
        if len(cells) != len(self.columns):
            raise ValueError(
                f"row width {len(cells)} != header width {len(self.columns)}"
            )
        self.rows.append(tuple(cells))

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def render(self, fmt: str = "csv") -> str:
        if fmt not in _DELIMITERS:
            raise ValueError(f"format must be one of {sorted(_DELIMITERS)}")
        sep = _DELIMITERS[fmt]
        lines = [
            f"# schema={SCHEMA_VERSION}",
            f"# command={self.command}",
            f"# config={config_digest(self.config)}",
            sep.join(self.columns),
        ]
        for row in self.rows:
            lines.append(sep.join(format_value(c) for c in row))
        for key, value in self.notes.items():
            lines.append(f"# {key}={value}")
        for key, ok in self.verdicts.items():
            lines.append(f"# verdict_{key}={'pass' if ok else 'fail'}")
        lines.append(f"# overall={'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"

    def write(self, path, fmt: str = "csv") -> None:
        Path(path).write_text(self.render(fmt), encoding="ascii")


def render_figure(report: Report, out_path) -> Path | None:
    """Render a companion PNG for a report next to its delimited file.

    Returns the figure path, or None when the report has no plottable
    shape.  Axes are chosen per command; everything else is matplotlib
    defaults on the Agg backend.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig_path = Path(out_path).with_suffix(".png")
    cols = {name: i for i, name in enumerate(report.columns)}
    fig, ax = plt.subplots(figsize=(7, 4.5))

    def series_by(key_col: str, x_col: str, y_col: str):
        groups: dict[str, list[tuple[float, float]]] = {}
        for row in report.rows:
            try:
                x = float(row[cols[x_col]])
                y = float(row[cols[y_col]])
            except (TypeError, ValueError):
                continue
            groups.setdefault(str(row[cols[key_col]]), []).append((x, y))
        return groups

    cmd = report.command
    if cmd in ("goldbach", "error-scaling") and "normalized" in cols:
        for label, pts in sorted(series_by("q", "N", "normalized").items()):
            xs, ys = zip(*sorted(pts))
            ax.loglog(xs, ys, marker="o", label=f"q={label}")
        ax.set_xlabel("N")
        ax.set_ylabel("|E_q(N)| / (N log^3 N)")
        ax.legend(fontsize=8)
    elif cmd == "explicit-formula" and "residual_over_n32" in cols:
        for label, pts in sorted(series_by("q", "N", "residual_over_n32").items()):
            xs, ys = zip(*sorted(pts))
            ax.loglog(xs, ys, marker=".", label=f"q={label}")
        ax.set_xlabel("N")
        ax.set_ylabel("|R| / N^{3/2}")
        ax.legend(fontsize=8)
    elif cmd == "character-moments" and "ratio2" in cols:
        groups = series_by("char_index", "X", "ratio2")
        for label, pts in sorted(groups.items()):
            xs, ys = zip(*sorted(pts))
            ax.loglog(xs, ys, marker=".", alpha=0.7)
        ax.set_xlabel("X")
        ax.set_ylabel("J2 / ((h+1) X log^2(3qX/(h+1)))")
    elif cmd == "identity-suite" and "ratio" in cols:
        ys, labels = [], []
        for row in report.rows:
            try:
                ys.append(float(row[cols["lhs"]]))
                labels.append(str(row[cols["check_id"]]))
            except (TypeError, ValueError):
                continue
        ax.semilogy(range(len(ys)), [max(y, 1e-18) for y in ys], ".")
        ax.set_xlabel("row")
        ax.set_ylabel("check lhs")
    elif cmd == "sieve" and "psi_minus_x" in cols:
        pts = [
            (float(r[cols["x"]]), float(r[cols["psi_minus_x"]]))
            for r in report.rows
        ]
        xs, ys = zip(*sorted(pts))
        ax.semilogx(xs, ys, marker="o")
        ax.set_xlabel("x")
        ax.set_ylabel("psi(x) - x")
    else:
        plt.close(fig)
        return None
    ax.set_title(cmd)
    fig.tight_layout()
    fig.savefig(fig_path, dpi=110)
    plt.close(fig)
    return fig_path
