"""Experiment orchestration: run the configured policy sweeps and emit the
artifact bundle (CSV, summary table, plot script, metadata)."""

from __future__ import annotations

import concurrent.futures
import json
import os
import time
from dataclasses import dataclass

from . import __version__
from .bitalloc import complexity_report, enumerate_bset, ga_preset
from .channel import generate_channel
from .config import ExperimentConfig, config_to_dict
from .metrics import SweepRow, snr_sweep

CSV_HEADER = "snr_db,policy,delta_analytic,delta_mc,std_err,b_vector"

# Operating points echoed in every summary so the evaluation/operation-count
# table can be compared at a glance for the two standard receiver sizes.
SUMMARY_PATH_COUNTS = (8, 12)


@dataclass(frozen=True)
class ExperimentResult:
    rows: list
    csv_path: str
    summary_path: str
    plot_path: str
    metadata_path: str


def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        b_vec = "" if r.bits is None else "-".join(str(b) for b in r.bits)
        lines.append(
            f"{_fmt(r.snr_db)},{r.policy},{_fmt(r.delta_analytic)},"
            f"{_fmt(r.delta_mc)},{_fmt(r.std_err)},{b_vec}"
        )
    return "\n".join(lines) + "\n"


def _policy_worker(args):
    config, policy = args
    channel = generate_channel(config.channel)
    return snr_sweep(
        channel,
        policy,
        config.snr_grid_db,
        b_min=config.b_min,
        b_max=config.b_max,
        power_budget=config.power_budget(),
        mc_num_symbols=config.mc.num_symbols,
        mc_seed=config.mc.seed,
        quantizer_mode=config.mc.quantizer_mode,
        ga_params=config.ga_params(),
    )


def run_policies(config: ExperimentConfig, jobs: int = 1) -> list[SweepRow]:
    """One sweep per configured policy; rows come back in config order
    regardless of how the policy cells were scheduled."""
    tasks = [(config, policy) for policy in config.policies]
    if jobs <= 1 or len(tasks) == 1:
        chunks = [_policy_worker(t) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_policy_worker, tasks))
    rows = []
    for chunk in chunks:
        rows.extend(chunk)
    return rows


def build_summary(config: ExperimentConfig, rows: list[SweepRow]) -> str:
    """Text table with feasible-set sizes, allocator evaluation counts and
    closed-form operation counts, then the per-policy sweep results."""
    geom = config.channel.geometry
    n_t, n_r = geom.num_tx_antennas, geom.num_rx_antennas
    lines = []
    lines.append(f"experiment: {config.name}")
    lines.append(
        f"channel: {n_r}x{n_t}, streams={config.channel.num_streams}, "
        f"budget={config.power_budget():g}, bits [{config.b_min}, {config.b_max}]"
    )
    lines.append("")
    lines.append("evaluation counts (budget = all-2-bit cost, bits 1..4)")
    lines.append("paths  |B_set|   fs-evals  ga-evals  gain-scan-evals")
    ga_evals = {}
    bset_sizes = {}
    for n_s in SUMMARY_PATH_COUNTS:
        space = enumerate_bset(n_s)
        size = space.cardinality()
        preset = ga_preset(n_s)
        bset_sizes[n_s] = size
        ga_evals[n_s] = preset.population * preset.generations
        lines.append(
            f"{n_s:5d}  {size:8d}  {size:8d}  {ga_evals[n_s]:8d}  {size:8d}"
        )
    lines.append("")
    lines.append("operation counts (complex mults / complex adds / real adds)")
    lines.append("paths  method      mults        adds         real-adds")
    for n_s in SUMMARY_PATH_COUNTS:
        size = bset_sizes[n_s]
        for method, evals in (("fs", size), ("ga", ga_evals[n_s]), ("crlb", size)):
            rep = complexity_report(method, n_s, n_t, n_r, 4, evals)
            lines.append(
                f"{n_s:5d}  {method:<6s}  {rep.complex_mults:>12d} "
                f"{rep.complex_adds:>12d} {rep.real_adds:>12d}"
            )
    lines.append("")
    lines.append("sweep results")
    lines.append("policy           snr_db   delta_analytic   b_vector")
    for r in rows:
        b_vec = "-" if r.bits is None else "-".join(str(b) for b in r.bits)
        lines.append(
            f"{r.policy:<15s}  {r.snr_db:6.1f}   {r.delta_analytic:<15.6g}  {b_vec}"
        )
    return "\n".join(lines) + "\n"


_PLOT_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Render trace-MSE vs SNR curves from results.csv (one line per policy).\"\"\"
import csv
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(list)
with open(os.path.join(here, "results.csv"), newline="") as fh:
    for row in csv.DictReader(fh):
        curves[row["policy"]].append((float(row["snr_db"]), float(row["delta_analytic"])))

fig, ax = plt.subplots(figsize=(7, 5))
for policy, pts in curves.items():
    pts.sort()
    ax.semilogy([p[0] for p in pts], [p[1] for p in pts], marker="o", label=policy)
ax.set_xlabel("SNR [dB]")
ax.set_ylabel("trace MSE")
ax.grid(True, which="both", alpha=0.4)
ax.legend()
fig.tight_layout()
out = os.path.join(here, "mse_vs_snr.png")
fig.savefig(out, dpi=150)
print(f"wrote {out}")
"""


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Execute the configured experiment and write the artifact bundle.

    ``results.csv`` and ``summary.txt`` are byte-deterministic for a given
    config; wall-clock metadata lives only in ``run_metadata.json``.
    """
    out_dir = config.output_dir
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc

    rows = run_policies(config, jobs=jobs)

    csv_path = os.path.join(out_dir, "results.csv")
    summary_path = os.path.join(out_dir, "summary.txt")
    plot_path = os.path.join(out_dir, "plot_results.py")
    metadata_path = os.path.join(out_dir, "run_metadata.json")

    def _write(path, text):
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc

    _write(csv_path, rows_to_csv(rows))
    _write(summary_path, build_summary(config, rows))
    _write(plot_path, _PLOT_SCRIPT)
    _write(
        metadata_path,
        json.dumps(
            {
                "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
                "package_version": __version__,
                "config": config_to_dict(config),
            },
            indent=2,
        )
        + "\n",
    )
    return ExperimentResult(
        rows=rows,
        csv_path=csv_path,
        summary_path=summary_path,
        plot_path=plot_path,
        metadata_path=metadata_path,
    )
