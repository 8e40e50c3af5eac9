# -*- coding: utf-8 -*-

import math
from dataclasses import dataclass
from dataclasses import replace
from typing import Optional

import numpy as np

from roadaware.base.exceptions import CurveFitError
from roadaware.base.exceptions import RoadawareError
from roadaware.base.logs import Logs
from roadaware.base.utils.time import elapsed_us
from roadaware.base.utils.time import monotonic_us
from roadaware.baselines.entities import BaselineConfig
from roadaware.baselines.services import build_fingerprint_grid
from roadaware.baselines.services import cf_els_locate
from roadaware.baselines.services import fit_cfels_models
from roadaware.baselines.services import gift_locate
from roadaware.baselines.services import query_gradient
from roadaware.baselines.services import rwknn_locate
from roadaware.crlb.services import crlb_report
from roadaware.crlb.services import segment_geometry
from roadaware.curvefit.entities import CurveFitConfig
from roadaware.curvefit.services import fit_segment_curves
from roadaware.curvefit.services import map_coordinate
from roadaware.features.entities import SFConfig
from roadaware.features.services import window_feature_set
from roadaware.msvl.entities import LocatorConfig
from roadaware.msvl.entities import OnlineBuffer
from roadaware.msvl.entities import ReferenceWindows
from roadaware.msvl.entities import RoadEntry
from roadaware.msvl.entities import RoadProfileDB
from roadaware.msvl.services import build_profile_db
from roadaware.msvl.services import locate
from roadaware.msvl.services import locate_features
from roadaware.scenario.services import desk_scenario_from_settings
from roadaware.scenario.services import generate_dataset
from roadaware.scenario.services import load_scenario
from roadaware.scenario.services import noise_sigmas_for_snr
from roadaware.scenario.services import with_base_stations
from roadaware.scenario.services import with_noise
from roadaware.scenario.services import with_sample_interval
from roadaware.segmentation.entities import SegmentationConfig
from roadaware.segmentation.entities import SegmentPartition
from roadaware.segmentation.services import bottom_up_partition

from .entities import METHOD_CFELS
from .entities import METHOD_GIFT
from .entities import METHOD_MSVL
from .entities import METHOD_RWKNN
from .entities import SWEEP_BS_COUNT
from .entities import SWEEP_GRID_SIZE
from .entities import SWEEP_SNR
from .entities import FixRecord
from .metrics import linear_fit_r2
from .metrics import summarize
from .workers import TrialPool

# Partitions compared by the SNR sweep.
PARTITION_SP = "sp"
PARTITION_UNIFORM = "uniform"

logs = Logs(name="bench")


@dataclass(frozen=True)
class PipelineConfigs:
    """The module configurations a benchmark builds its localizers with."""
    segmentation: SegmentationConfig
    features: SFConfig
    curvefit: CurveFitConfig
    locator: LocatorConfig
    baselines: BaselineConfig

    @classmethod
    def from_settings(cls, overrides=None):
        return cls(segmentation=SegmentationConfig.from_settings(overrides),
                   features=SFConfig.from_settings(overrides),
                   curvefit=CurveFitConfig.from_settings(overrides),
                   locator=LocatorConfig.from_settings(overrides),
                   baselines=BaselineConfig.from_settings(overrides))


@dataclass(frozen=True, eq=False)
class Localizers:
    """Everything built from the training traversal of one scenario."""
    scenario: object
    db: Optional[RoadProfileDB]
    grid: object
    cfels: object
    grid_size_m: float


@dataclass(frozen=True, eq=False)
class BenchmarkRun:
    config: object
    metrics: dict
    sweep_rows: tuple = ()
    snr_rows: tuple = ()
    latency_rows: tuple = ()


def load_run_scenario(run_config):
    if run_config.scenario_file:
        scenario = load_scenario(run_config.scenario_file)
    else:
        scenario = desk_scenario_from_settings(seed=run_config.seed)
    if run_config.snr_db is not None:
        scenario = with_noise(scenario, noise_sigmas_for_snr(scenario, run_config.snr_db))
    return scenario


def build_localizers(scenario, configs, methods, seed, grid_size_m=None):
    grid_size_m = grid_size_m or configs.baselines.grid_size_m
    training = generate_dataset(scenario, seed)
    db = grid = cfels = None
    if METHOD_MSVL in methods:
        db = build_profile_db(training, configs.segmentation, configs.features,
                              configs.curvefit, locator=configs.locator)
    if METHOD_RWKNN in methods or METHOD_GIFT in methods:
        grid = build_fingerprint_grid(training, grid_size_m)
    if METHOD_CFELS in methods:
        cfels = fit_cfels_models(training, [bs.position for bs in scenario.base_stations])
    return Localizers(scenario=scenario, db=db, grid=grid, cfels=cfels,
                      grid_size_m=grid_size_m)


def true_segment(db, road_id, position):
    for segment in db.road(road_id).segments:
        if segment.start <= position <= segment.end:
            return segment.segment_id
    return None


def _locate_with(method, localizers, configs, run_config, buffer):
    if method == METHOD_MSVL:
        fix = locate(buffer, localizers.db, configs.locator.rss_span)
        return fix.coord, (fix.road_id, fix.segment_id)
    if method == METHOD_RWKNN:
        fix = rwknn_locate(localizers.grid, buffer.latest, configs.baselines.rwknn_k,
                           configs.baselines.rwknn_radius_cells)
    elif method == METHOD_GIFT:
        fix = gift_locate(localizers.grid,
                          query_gradient(buffer.rss, buffer.sample_interval_m))
    else:
        fix = cf_els_locate(localizers.cfels, buffer.latest, run_config.cfels_step_m)
    return fix.coord, None


def replay(method, localizers, configs, run_config, test_dataset, trial=0):
    """Replays held-out traversals through a trailing buffer and records one
    fix every `stride` positions once the buffer is full."""

    capacity = configs.locator.buffer_capacity
    records = []
    for seq in test_dataset:
        interval = seq.sample_interval_m or float(np.median(seq.steps()))
        buffer = OnlineBuffer(capacity, interval, configs.segmentation.min_segment_len)
        for position, rss in enumerate(seq.rss):
            buffer.push(rss)
            if not buffer.is_full or (position - capacity + 1) % run_config.stride:
                continue
            truth = (float(seq.coords[position][0]), float(seq.coords[position][1]))
            start = monotonic_us()
            try:
                coord, scales = _locate_with(method, localizers, configs, run_config,
                                             buffer)
            except RoadawareError as error:
                logs.debug("%s: no fix at road %s position %d: %s"
                           % (method, seq.road_id, position, error))
                coord, scales = None, None
            latency = elapsed_us(start)

            segment_correct = None
            if method == METHOD_MSVL:
                expected = (seq.road_id, true_segment(localizers.db, seq.road_id, position))
                segment_correct = scales == expected
            error_m = (math.hypot(coord[0] - truth[0], coord[1] - truth[1])
                       if coord is not None else None)
            records.append(FixRecord(method=method, trial=trial, road_id=seq.road_id,
                                     position=position, truth=truth, estimate=coord,
                                     error_m=error_m, latency_us=latency,
                                     segment_correct=segment_correct))
    return records


def run_trials(localizers, configs, run_config, seed):
    """Runs every trial through the worker pool and summarizes each method."""

    def run_trial(trial):
        test_dataset = generate_dataset(localizers.scenario, seed + 1 + trial)
        return {method: replay(method, localizers, configs, run_config, test_dataset, trial)
                for method in run_config.methods}

    pool = TrialPool(run_config.workers, run_config.queue_timeout_s, run_config.progress)
    results = pool.run(run_trial, range(run_config.trials))
    metrics = {}
    for method in run_config.methods:
        records = [record for result in results for record in result[method]]
        metrics[method] = summarize(method, records, run_config.cdf_resolution)
        logs.info("%s: %d fixes, MDE %.3f m, mean delay %.1f us"
                  % (method, metrics[method].fixes, metrics[method].mde_m,
                     metrics[method].mean_delay_us))
    return metrics


def uniform_partition(road_id, length, num_segments):
    """Equal-length segments, as many as a reference partition."""

    boundaries = [int(round(length * i / num_segments)) - 1
                  for i in range(1, num_segments)]
    return SegmentPartition(road_id=road_id, length=length,
                            sp_indices=sorted(set(b for b in boundaries
                                                  if 0 <= b <= length - 2)))


def segment_positioning(scenario, training, test, partition, curve_config):
    """Squared errors of segment centroid estimates, and the trace bounds of
    the segments, for one road and one partition."""

    squared, bounds = [], []
    for start, end in partition.segment_bounds:
        scope = (training.road_id, start)
        try:
            curves = fit_segment_curves(training.slice(start, end), curve_config.order,
                                        scope=scope, margin=curve_config.bbox_margin,
                                        skip_degenerate=True)
        except CurveFitError as error:
            logs.debug("Segment %s skipped: %s" % (scope, error))
            continue
        estimates = []
        for rss in test.rss[start:end + 1]:
            try:
                estimates.append(map_coordinate(curves, rss))
            except CurveFitError:
                continue
        if not estimates:
            continue
        estimate = np.mean(estimates, axis=0)
        centroid = test.coords[start:end + 1].mean(axis=0)
        squared.append(float(np.sum((estimate - centroid) ** 2)))
        try:
            report = crlb_report(segment_geometry(scenario, test, start, end))
        except RoadawareError as error:
            logs.debug("No bound for segment %s: %s" % (scope, error))
            continue
        if report.bounded:
            bounds.append(report.trace_bound)
    return squared, bounds


def snr_sweep(base_scenario, configs, run_config):
    """Segment positioning RMSE of singular point partitions and of equal
    length partitions, with the mean trace bound, for each SNR."""

    rows = []
    for snr in run_config.sweep_values:
        scenario = with_noise(base_scenario, noise_sigmas_for_snr(base_scenario, snr))
        training = generate_dataset(scenario, run_config.seed)
        squared = {PARTITION_SP: [], PARTITION_UNIFORM: []}
        bounds = {PARTITION_SP: [], PARTITION_UNIFORM: []}
        for trial in range(run_config.trials):
            test_dataset = generate_dataset(scenario, run_config.seed + 1 + trial)
            for train_seq, test_seq in zip(training, test_dataset):
                sp = bottom_up_partition(train_seq, configs.segmentation)
                partitions = {
                    PARTITION_SP: sp,
                    PARTITION_UNIFORM: uniform_partition(train_seq.road_id, len(train_seq),
                                                         sp.num_segments),
                }
                for name, partition in partitions.items():
                    errors, segment_bounds = segment_positioning(
                        scenario, train_seq, test_seq, partition, configs.curvefit)
                    squared[name].extend(errors)
                    bounds[name].extend(segment_bounds)
        for name in (PARTITION_SP, PARTITION_UNIFORM):
            rmse = math.sqrt(math.fsum(squared[name]) / len(squared[name])) \
                if squared[name] else math.nan
            crlb = math.sqrt(math.fsum(bounds[name]) / len(bounds[name])) \
                if bounds[name] else math.nan
            rows.append({"snr_db": float(snr), "partition": name, "rmse_m": rmse,
                         "crlb_m": crlb})
        logs.info("SNR %s dB: %s" % (snr, rows[-2:]))
    return rows


def synthetic_db(db, num_roads, num_segments):
    """A profile database of `num_roads` roads with `num_segments` segments
    each, cycling through the entries of `db`. A copied segment brings its
    reference windows along, shifted to its new place on the road."""

    roads = []
    for index in range(num_roads):
        source = db.roads[index % len(db.roads)]
        segments, ends, rows = [], [], []
        start = 0
        for number in range(num_segments):
            segment = source.segments[number % len(source.segments)]
            shift = start - segment.start
            kept = source.segment_rows(segment)
            ends.extend(int(end) + shift for end in source.references.ends[kept])
            rows.append(source.references.features[kept])
            segments.append(replace(segment, segment_id=number + 1, start=start,
                                    end=segment.end + shift, prior=1.0 / num_segments))
            start = segment.end + shift + 1
        roads.append(RoadEntry(road_id=index + 1, mask=source.mask,
                               normalization=source.normalization,
                               segment_normalization=source.segment_normalization,
                               references=ReferenceWindows(ends=ends,
                                                           features=np.vstack(rows)),
                               segments=tuple(segments), penalty=source.penalty))
    return replace(db, roads=tuple(roads))


def _mean_latency(db, queries, repeats):
    total, count = 0.0, 0
    for _ in range(repeats):
        for features, current in queries:
            total += locate_features(features, current, db).latency_us
            count += 1
    return total / count


def latency_scaling(db, queries, road_counts, segment_counts, repeats=100):
    """Mean matching latency against the number of roads (at the largest
    segment count) and against the number of segments (at the largest road
    count), each with the R^2 of a linear fit."""

    rows = []
    sweeps = (("roads", road_counts, lambda m: synthetic_db(db, m, max(segment_counts))),
              ("segments", segment_counts, lambda n: synthetic_db(db, max(road_counts), n)))
    for axis, values, make_db in sweeps:
        latencies = [_mean_latency(make_db(value), queries, repeats) for value in values]
        r2 = linear_fit_r2(values, latencies)[2] if len(values) > 1 else math.nan
        for value, latency in zip(values, latencies):
            rows.append({"axis": axis, "value": int(value), "mean_latency_us": latency,
                         "r2": r2})
        logs.info("Latency vs %s: R^2 %.4f" % (axis, r2))
    return rows


def latency_queries(test_dataset, capacity):
    """Feature sets of the first full buffer of every test road."""

    queries = []
    for seq in test_dataset:
        window = seq.rss[:capacity]
        interval = seq.sample_interval_m or float(np.median(seq.steps()))
        queries.append((window_feature_set(window, interval), window[-1]))
    return queries


def run_benchmark(run_config, configs):
    """Builds the localizers from one noise realization, replays independent
    realizations and runs the configured sweep."""

    scenario = load_run_scenario(run_config)
    localizers = build_localizers(scenario, configs, run_config.methods, run_config.seed)
    metrics = run_trials(localizers, configs, run_config, run_config.seed)

    sweep_rows, snr_rows = [], []
    if run_config.sweep == SWEEP_BS_COUNT:
        for count in run_config.sweep_values:
            reduced = with_base_stations(scenario, int(count))
            built = build_localizers(reduced, configs, run_config.methods, run_config.seed)
            for method, result in run_trials(built, configs, run_config,
                                             run_config.seed).items():
                sweep_rows.append({"bs_count": int(count), "method": method,
                                   "mean_delay_us": result.mean_delay_us,
                                   "mde_m": result.mde_m})
    elif run_config.sweep == SWEEP_GRID_SIZE:
        for size in run_config.sweep_values:
            resampled = with_sample_interval(scenario, float(size))
            built = build_localizers(resampled, configs, run_config.methods,
                                     run_config.seed, grid_size_m=float(size))
            for method, result in run_trials(built, configs, run_config,
                                             run_config.seed).items():
                sweep_rows.append({"grid_size_m": float(size), "method": method,
                                   "mde_m": result.mde_m,
                                   "mean_delay_us": result.mean_delay_us})
    elif run_config.sweep == SWEEP_SNR:
        snr_rows = snr_sweep(scenario, configs, run_config)

    latency_rows = []
    if localizers.db is not None and run_config.latency_road_counts \
            and run_config.latency_segment_counts:
        queries = latency_queries(generate_dataset(scenario, run_config.seed + 1),
                                  configs.locator.buffer_capacity)
        latency_rows = latency_scaling(localizers.db, queries,
                                       run_config.latency_road_counts,
                                       run_config.latency_segment_counts,
                                       run_config.latency_repeats)

    return BenchmarkRun(config=run_config, metrics=metrics, sweep_rows=tuple(sweep_rows),
                        snr_rows=tuple(snr_rows), latency_rows=tuple(latency_rows))

