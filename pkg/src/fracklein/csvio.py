"""CSV output with a fixed column schema, plus optional plot-script sidecars."""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path

CSV_HEADER = ("alpha", "beta", "eps", "p", "tau", "N", "t_final",
              "e1", "e1_max", "order", "energy_dev", "iters_max")


def fmt(value, full_precision: bool = False) -> str:
    if value is None:
        return ""
    if isinstance(value, (tuple, list)):
        return "x".join(str(v) for v in value)
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    if full_precision:
        return repr(v)
    return f"{v:.5e}"


def record_row(rec) -> dict:
    """Map an ``ErrorRecord`` (or any object with those attributes) to a CSV row."""
    return {
        "alpha": rec.alpha,
        "beta": getattr(rec, "beta", None),
        "eps": rec.eps,
        "p": rec.p,
        "tau": rec.tau,
        "N": getattr(rec, "N", None),
        "t_final": getattr(rec, "t_final", None),
        "e1": getattr(rec, "e1", None),
        "e1_max": getattr(rec, "e1_max", None),
        "order": getattr(rec, "order", None),
        "energy_dev": getattr(rec, "energy_dev", None),
        "iters_max": getattr(rec, "iters_max", None),
    }


def write_csv(rows, path, full_precision: bool = False) -> Path:
    """Write dict rows keyed by ``CSV_HEADER``; unknown keys are rejected."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in rows:
            extra = set(row) - set(CSV_HEADER)
            if extra:
                raise KeyError(f"unknown CSV columns: {sorted(extra)}")
            w.writerow([fmt(row.get(k), full_precision) for k in CSV_HEADER])
    return path


def write_records(records, path, full_precision: bool = False) -> Path:
    return write_csv([record_row(r) for r in records], path, full_precision)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


_PLOT_TEMPLATE = '''"""Plot {csv_name}; run from this directory."""
import csv

import matplotlib.pyplot as plt

with open("{csv_name}") as fh:
    rows = list(csv.DictReader(fh))

fig, ax = plt.subplots()
groups = {{}}
for r in rows:
    if r["{y}"] in ("", "nan"):
        continue
    groups.setdefault(r["{group}"], []).append((float(r["{x}"]), float(r["{y}"])))
for key, pts in sorted(groups.items()):
    pts.sort()
    ax.loglog(*zip(*pts), "o-", label="{group}=" + key)
ax.set_xlabel("{x}")
ax.set_ylabel("{y}")
ax.legend()
fig.savefig("{stem}.png", dpi=150)
'''


def write_plot_sidecar(csv_path, x: str, y: str, group: str) -> Path:
    csv_path = Path(csv_path)
    script = csv_path.with_name(csv_path.stem + "_plot.py")
    script.write_text(_PLOT_TEMPLATE.format(csv_name=os.path.basename(csv_path), x=x, y=y,
                                            group=group, stem=csv_path.stem))
    return script
