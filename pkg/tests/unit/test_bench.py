# -*- coding: utf-8 -*-

import math

import pytest

from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import DataError
from roadaware.baselines.entities import BaselineConfig
from roadaware.baselines.services import build_fingerprint_grid
from roadaware.bench.entities import FixRecord
from roadaware.bench.entities import METHOD_GIFT
from roadaware.bench.entities import METHOD_MSVL
from roadaware.bench.entities import METHOD_RWKNN
from roadaware.bench.entities import RunConfig
from roadaware.bench.entities import SWEEP_SNR
from roadaware.bench.metrics import compute_cdf
from roadaware.bench.metrics import compute_mde
from roadaware.bench.metrics import compute_rmse
from roadaware.bench.metrics import linear_fit_r2
from roadaware.bench.metrics import summarize
from roadaware.bench.plots import emit_plot_data
from roadaware.bench.plots import load_run
from roadaware.bench.plots import save_run
from roadaware.bench.services import Localizers
from roadaware.bench.services import PipelineConfigs
from roadaware.bench.services import latency_queries
from roadaware.bench.services import latency_scaling
from roadaware.bench.services import replay
from roadaware.bench.services import synthetic_db
from roadaware.bench.services import true_segment
from roadaware.bench.services import uniform_partition
from roadaware.bench.workers import TrialPool
from roadaware.msvl.entities import LocatorConfig
from roadaware.msvl.services import build_profile_db
from roadaware.msvl.services import matching_cost


@pytest.fixture
def configs(seg_config, sf_config, curve_config):
    return PipelineConfigs(segmentation=seg_config, features=sf_config,
                           curvefit=curve_config, locator=LocatorConfig(),
                           baselines=BaselineConfig(grid_size_m=1.0))


@pytest.fixture
def localizers(two_roads, configs):
    db = build_profile_db(two_roads, configs.segmentation, configs.features,
                          configs.curvefit)
    return Localizers(scenario=None, db=db, grid=build_fingerprint_grid(two_roads, 1.0),
                      cfels=None, grid_size_m=1.0)


def record(error_m, latency_us=10.0, segment_correct=None):
    return FixRecord(method=METHOD_MSVL, trial=0, road_id=1, position=0, truth=(0.0, 0.0),
                     estimate=None if error_m is None else (error_m, 0.0), error_m=error_m,
                     latency_us=latency_us, segment_correct=segment_correct)


def test_error_metrics():
    assert compute_mde([1.0, None, 3.0, math.nan]) == 2.0
    assert compute_rmse([3.0, 4.0]) == pytest.approx(math.sqrt(12.5))
    assert compute_rmse([1.0, 3.0]) == pytest.approx(math.sqrt(5.0))
    assert math.isnan(compute_mde([None]))
    assert math.isnan(compute_rmse([]))


def test_cdf():
    cdf = compute_cdf([4.0, 1.0, 3.0, 2.0], resolution=5)
    assert cdf == [(0.0, 0.0), (1.0, 0.25), (2.0, 0.5), (3.0, 0.75), (4.0, 1.0)]
    assert compute_cdf([0.1, 0.7], resolution=50)[-1] == (0.7, 1.0)
    assert compute_cdf([None]) == []


def test_summarize():
    records = [record(1.0, 10.0, True), record(3.0, 20.0, False), record(None, 30.0, False)]
    metrics = summarize(METHOD_MSVL, records, cdf_resolution=3)
    assert metrics.fixes == 3
    assert metrics.located == 2
    assert metrics.mde_m == 2.0
    assert metrics.mean_delay_us == 20.0
    assert metrics.segment_accuracy == pytest.approx(1.0 / 3.0)
    assert metrics.cdf == ((0.0, 0.0), (1.5, 0.5), (3.0, 1.0))


def test_linear_fit():
    slope, intercept, r2 = linear_fit_r2([1, 2, 3, 4], [3.0, 5.0, 7.0, 9.0])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)
    assert linear_fit_r2([1, 2, 3, 4], [1.0, 3.0, 2.0, 4.0])[2] < 1.0


def test_pool_keeps_task_order():
    pool = TrialPool(3, queue_timeout_s=0.05, progress=False)
    assert pool.run(lambda task: task * task, range(10)) == [t * t for t in range(10)]


def test_pool_raises_first_failure():
    def handler(task):
        if task in (3, 7):
            raise ValueError("task %d" % task)
        return task

    pool = TrialPool(2, queue_timeout_s=0.05, progress=False)
    with pytest.raises(ValueError, match="task 3"):
        pool.run(handler, range(10))


def test_run_config():
    config = RunConfig.from_settings()
    assert config.methods == (METHOD_MSVL, METHOD_RWKNN, METHOD_GIFT)
    assert config.stride == 20
    assert config.snr_db is None
    assert not config.progress
    assert config.latency_road_counts == ()
    with pytest.raises(ConfigurationError):
        RunConfig(methods=("dead-reckoning",))
    with pytest.raises(ConfigurationError):
        RunConfig(sweep=SWEEP_SNR)
    with pytest.raises(ConfigurationError):
        RunConfig(stride=0)


def test_uniform_partition():
    assert uniform_partition(1, 50, 2).segment_bounds == [(0, 24), (25, 49)]
    assert uniform_partition(1, 10, 3).segment_lengths() == [3, 4, 3]
    assert uniform_partition(1, 10, 1).num_segments == 1


def test_synthetic_db(localizers):
    db = synthetic_db(localizers.db, 3, 4)
    assert [road.road_id for road in db.roads] == [1, 2, 3]
    assert all(len(road.segments) == 4 for road in db.roads)
    assert [s.prior for s in db.road(3).segments] == [0.25] * 4
    assert db.road(3).mask == localizers.db.road(1).mask
    road = db.road(3)
    assert [(s.start, s.end) for s in road.segments] == [(0, 24), (25, 49), (50, 74),
                                                         (75, 99)]
    assert road.references.ends.tolist()[:25] == list(range(2, 27))
    assert road.segment_rows(road.segments[2]).size == 23
    # Roads 1 and 3 copy the 48 windows of road 1 twice, road 2 its own 48
    # four times; every window counts at both scales.
    assert db.num_references == 96 + 192 + 96
    assert matching_cost(db) == 10 * 2 * (96 + 192 + 96)


def test_latency_scaling(localizers, two_roads):
    queries = latency_queries(two_roads, 40)
    assert len(queries) == 2
    rows = latency_scaling(localizers.db, queries, [1, 2, 4], [1, 3], repeats=2)
    assert [(row["axis"], row["value"]) for row in rows] == [
        ("roads", 1), ("roads", 2), ("roads", 4), ("segments", 1), ("segments", 3)]
    assert all(row["mean_latency_us"] >= 0 for row in rows)


def test_replay_msvl(localizers, configs, two_roads):
    run_config = RunConfig(methods=(METHOD_MSVL,), stride=5, progress=False)
    records = replay(METHOD_MSVL, localizers, configs, run_config, two_roads)
    assert [(r.road_id, r.position) for r in records] == [
        (1, 39), (1, 44), (1, 49), (2, 39), (2, 44), (2, 49)]
    last = records[2]
    assert last.truth == (49.0, 0.0)
    assert last.error_m == pytest.approx(0.0, abs=1e-6)
    assert last.segment_correct
    assert all(r.latency_us >= 0 for r in records)
    assert true_segment(localizers.db, 1, 24) == 1


def test_replay_rwknn_exact_positions(localizers, configs, two_roads):
    run_config = RunConfig(methods=(METHOD_RWKNN,), stride=5, progress=False)
    records = replay(METHOD_RWKNN, localizers, configs, run_config, two_roads[1:])
    assert [r.error_m for r in records] == [0.0, 0.0, 0.0]
    assert all(r.segment_correct is None for r in records)


def plot_data():
    return {
        "methods": {"msvl": {"mde_m": 1.5, "rmse_m": 2.0, "mean_delay_us": 10.0,
                             "fixes": 4, "located": 3, "segment_accuracy": None,
                             "cdf": [[0.0, 0.0], [3.0, 1.0]]}},
        "sweep": [{"bs_count": 2, "method": "msvl", "mean_delay_us": 10.0, "mde_m": 1.5}],
        "snr": [],
        "latency": [],
    }


def test_emit_plot_data(tmp_path):
    paths = emit_plot_data(plot_data(), str(tmp_path))
    assert [p.rsplit("/", 1)[-1] for p in paths] == [
        "summary.csv", "cdf.csv", "delay_vs_bs_count.csv"]
    assert (tmp_path / "summary.csv").read_text() == (
        "method,fixes,located,mde_m,rmse_m,mean_delay_us,segment_accuracy\n"
        "msvl,4,3,1.5,2.0,10.0,\n")
    assert (tmp_path / "cdf.csv").read_text() == (
        "method,error_m,fraction\nmsvl,0.0,0.0\nmsvl,3.0,1.0\n")
    assert (tmp_path / "delay_vs_bs_count.csv").read_text().splitlines()[1] == \
        "2,msvl,10.0,1.5"


def test_run_record(tmp_path):
    save_run(plot_data(), str(tmp_path))
    assert load_run(str(tmp_path)) == plot_data()
    with pytest.raises(DataError):
        load_run(str(tmp_path / "missing"))
    (tmp_path / "broken.json").write_text("{not json")
    with pytest.raises(DataError):
        load_run(str(tmp_path / "broken.json"))
    (tmp_path / "other.json").write_text('{"roads": []}')
    with pytest.raises(DataError):
        load_run(str(tmp_path / "other.json"))
