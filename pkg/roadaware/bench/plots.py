# -*- coding: utf-8 -*-
"""
Plot-ready output of a benchmark run: the run record as JSON and one CSV
series per figure analog. Column headers are fixed.
"""

import csv
import os
from dataclasses import asdict

from roadaware.base.exceptions import DataError
from roadaware.base.utils import json

RUN_FILE = "run.json"

SUMMARY_COLUMNS = ["method", "fixes", "located", "mde_m", "rmse_m", "mean_delay_us",
                   "segment_accuracy"]
CDF_COLUMNS = ["method", "error_m", "fraction"]
DELAY_COLUMNS = ["bs_count", "method", "mean_delay_us", "mde_m"]
GRID_COLUMNS = ["grid_size_m", "method", "mde_m", "mean_delay_us"]
SNR_COLUMNS = ["snr_db", "partition", "rmse_m", "crlb_m"]
LATENCY_COLUMNS = ["axis", "value", "mean_latency_us", "r2"]


def run_to_dict(run):
    config = asdict(run.config)
    return {
        "config": config,
        "methods": {method: {
            "mde_m": metrics.mde_m,
            "rmse_m": metrics.rmse_m,
            "mean_delay_us": metrics.mean_delay_us,
            "fixes": metrics.fixes,
            "located": metrics.located,
            "segment_accuracy": metrics.segment_accuracy,
            "cdf": [list(point) for point in metrics.cdf],
        } for method, metrics in run.metrics.items()},
        "sweep": list(run.sweep_rows),
        "snr": list(run.snr_rows),
        "latency": list(run.latency_rows),
    }


def _write_csv(file_path, columns, rows):
    with open(file_path, "w", encoding="utf-8", newline="") as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(["" if row.get(column) is None else row[column]
                             for column in columns])


def emit_plot_data(data, out_dir):
    """Writes the CSV series of a run record; returns the written paths."""

    os.makedirs(out_dir, exist_ok=True)
    methods = data.get("methods", {})
    summary = [dict(metrics, method=method) for method, metrics in sorted(methods.items())]
    cdf = [{"method": method, "error_m": error, "fraction": fraction}
           for method, metrics in sorted(methods.items())
           for error, fraction in metrics.get("cdf", [])]
    sweep = data.get("sweep", [])

    series = [("summary.csv", SUMMARY_COLUMNS, summary), ("cdf.csv", CDF_COLUMNS, cdf)]
    if any("bs_count" in row for row in sweep):
        series.append(("delay_vs_bs_count.csv", DELAY_COLUMNS, sweep))
    if any("grid_size_m" in row for row in sweep):
        series.append(("mde_vs_grid_size.csv", GRID_COLUMNS, sweep))
    if data.get("snr"):
        series.append(("rmse_vs_snr.csv", SNR_COLUMNS, data["snr"]))
    if data.get("latency"):
        series.append(("latency_scaling.csv", LATENCY_COLUMNS, data["latency"]))

    paths = []
    for name, columns, rows in series:
        file_path = os.path.join(out_dir, name)
        _write_csv(file_path, columns, rows)
        paths.append(file_path)
    return paths


def save_run(data, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    file_path = os.path.join(out_dir, RUN_FILE)
    json.dump_file(data, file_path)
    return file_path


def load_run(run_path):
    """Reads a run record from a run.json file or the directory holding it."""

    if os.path.isdir(run_path):
        run_path = os.path.join(run_path, RUN_FILE)
    if not os.path.isfile(run_path):
        raise DataError("Run record not found: %s" % run_path)
    try:
        data = json.load_file(run_path)
    except ValueError as error:
        raise DataError("Unreadable run record %s: %s" % (run_path, error))
    if not isinstance(data, dict) or "methods" not in data:
        raise DataError("Not a benchmark run record: %s" % run_path)
    return data
