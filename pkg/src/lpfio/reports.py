"""Report containers and writers: CSV tables, JSON summaries and gnuplot scripts."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Report", "canonical_json", "config_hash", "format_value", "write_report"]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    """Git blob hash (sha1 over ``"blob <len>\\0" + body``) of the canonical JSON form."""
    body = canonical_json(config).encode()
    return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


@dataclass
class Report:
    """One experiment's output: a table, pass/fail verdicts and headline maxima.

    ``plots`` holds ``(name, title, x column, y column, logscale)`` tuples.
    """

    name: str
    config: dict
    header: list
    rows: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    maxima: dict = field(default_factory=dict)
    plots: list = field(default_factory=list)

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    @property
    def passed(self) -> bool:
        return all(bool(v) for v in self.verdicts.values())

    def summary(self) -> dict:
        return {
            "experiment": self.name,
            "config_hash": self.config_hash,
            "config": _plain(self.config),
            "verdicts": _plain(self.verdicts),
            "maxima": _plain(self.maxima),
        }


def write_report(report: Report, out_dir) -> dict:
    """Write ``<name>.csv``, ``<name>.json`` and one ``.gp`` script per plot; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = report.config_hash
    csv_path = out / f"{report.name}.csv"
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(report.header) + ["config_hash"])
        for row in report.rows:
            w.writerow([format_value(v) for v in row] + [h])
    json_path = out / f"{report.name}.json"
    json_path.write_text(json.dumps(report.summary(), sort_keys=True, indent=2) + "\n")
    paths = {"csv": csv_path, "json": json_path}
    for plot_name, title, xcol, ycol, logscale in report.plots:
        xi = report.header.index(xcol) + 1
        yi = report.header.index(ycol) + 1
        gp = out / f"{report.name}_{plot_name}.gp"
        lines = [
            "set datafile separator ','",
            "set key off",
            f"set title '{title}'",
            f"set xlabel '{xcol}'",
            f"set ylabel '{ycol}'",
        ]
        if logscale:
            lines.append(f"set logscale {logscale}")
        lines += [
            "set terminal pngcairo size 800,600",
            f"set output '{report.name}_{plot_name}.png'",
            f"plot '{csv_path.name}' every ::1 using {xi}:{yi} with linespoints",
        ]
        gp.write_text("\n".join(lines) + "\n")
        paths[plot_name] = gp
    return paths
