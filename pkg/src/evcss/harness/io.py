"""CSV results and companion plotting scripts."""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import astuple
from pathlib import Path

COLUMNS = ("experiment", "detector", "sweep_axis", "sweep_value", "M", "N", "snr_db",
           "rho_s", "threshold", "pfa_emp", "pfa_stderr", "pd_emp", "pd_stderr",
           "pd_analytic", "trials", "seed")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def write_results(rows, path) -> Path:
    """Write rows atomically; nothing appears at ``path`` unless all rows are written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name, suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for row in rows:
                w.writerow([_fmt(v) for v in astuple(row)])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def read_results(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


_PLOT_TEMPLATE = '''\
"""Plot {csv_name} (generated alongside the results)."""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV = {csv_path!r}
series = defaultdict(list)
with open(CSV, newline="") as fh:
    rows = list(csv.DictReader(fh))
axis = rows[0]["sweep_axis"]
metric = "pd_emp" if rows[0]["pd_emp"] else "pfa_emp"
for r in rows:
    series[r["detector"]].append(r)

fig, ax = plt.subplots(figsize=(6, 4))
for det, rs in series.items():
    x = [float(r["sweep_value"]) for r in rs]
    if axis == "pfa":
        ax.plot(x, [float(r[metric]) for r in rs], "o-", label=det + " (sim)")
    else:
        ax.errorbar(x, [float(r[metric]) for r in rs],
                    yerr=[2 * float(r[metric.replace("_emp", "_stderr")]) for r in rs],
                    fmt="o-", capsize=2, label=det + " (sim)")
    if rs[0]["pd_analytic"]:
        ax.plot(x, [float(r["pd_analytic"]) for r in rs], "k--", label=det + " (theory)")
ax.set_xlabel("P_FA" if axis == "pfa" else axis)
ax.set_ylabel("P_D" if metric == "pd_emp" else "P_FA")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else {png_path!r}
fig.savefig(out, dpi=150)
print(out)
'''


def emit_plot_script(csv_path) -> Path:
    csv_path = Path(csv_path)
    script = csv_path.with_name(csv_path.stem + "_plot.py")
    script.write_text(_PLOT_TEMPLATE.format(csv_name=csv_path.name, csv_path=str(csv_path),
                                            png_path=str(csv_path.with_suffix(".png"))),
                      encoding="utf-8")
    return script
