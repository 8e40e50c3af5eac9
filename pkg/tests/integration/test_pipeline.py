# -*- coding: utf-8 -*-

import csv
import math
from io import StringIO

import pytest
from django.core.management import call_command

from roadaware.bench.plots import load_run
from roadaware.scenario.services import save_scenario

from ..factories import ScenarioFactory


def read_csv(path):
    with open(str(path), encoding="utf-8") as source:
        return list(csv.DictReader(source))


@pytest.mark.slow
def test_bench_end_to_end(tmpdir):
    scenario_path = tmpdir.join("scenario.json")
    save_scenario(ScenarioFactory(), str(scenario_path))
    config = tmpdir.join("bench.ini")
    config.write("\n".join([
        "[settings]",
        "BENCH_SCENARIO_FILE = %s" % scenario_path,
        "BENCH_METHODS = msvl,rwknn,gift,cfels",
        "BENCH_SNR_DB = 30",
        "BENCH_TRIALS = 2",
        "BENCH_WORKERS = 2",
        "BENCH_STRIDE = 10",
        "BENCH_SWEEP = grid_size",
        "BENCH_SWEEP_VALUES = 1,2",
        "BENCH_LATENCY_ROAD_COUNTS = 1,2",
        "BENCH_LATENCY_SEGMENT_COUNTS = 1,2",
        "BENCH_LATENCY_REPEATS = 2",
        "",
    ]))
    out_dir = tmpdir.join("out")
    output = StringIO()
    call_command("bench", config=str(config), out=str(out_dir), stdout=output)
    assert "Wrote" in output.getvalue()

    data = load_run(str(out_dir))
    assert sorted(data["methods"]) == ["cfels", "gift", "msvl", "rwknn"]
    # Positions 39, 49, ..., 79 of both roads in both trials.
    assert all(m["fixes"] == 2 * 2 * 5 for m in data["methods"].values())
    assert data["config"]["snr_db"] == 30.0

    summary = read_csv(out_dir.join("summary.csv"))
    assert [row["method"] for row in summary] == ["cfels", "gift", "msvl", "rwknn"]
    rwknn = summary[-1]
    assert math.isfinite(float(rwknn["mde_m"]))
    assert float(rwknn["rmse_m"]) >= float(rwknn["mde_m"])

    cdf = read_csv(out_dir.join("cdf.csv"))
    assert {row["method"] for row in cdf} == {"cfels", "gift", "msvl", "rwknn"}
    grid = read_csv(out_dir.join("mde_vs_grid_size.csv"))
    assert len(grid) == 2 * 4
    latency = read_csv(out_dir.join("latency_scaling.csv"))
    assert [(row["axis"], row["value"]) for row in latency] == [
        ("roads", "1"), ("roads", "2"), ("segments", "1"), ("segments", "2")]
