# -*- coding: utf-8 -*-

import math
from dataclasses import replace

import numpy as np
import pytest

from roadaware.bench.entities import METHODS
from roadaware.bench.entities import METHOD_CFELS
from roadaware.bench.entities import METHOD_MSVL
from roadaware.bench.entities import RunConfig
from roadaware.bench.entities import SWEEP_SNR
from roadaware.bench.metrics import summarize
from roadaware.bench.services import PARTITION_SP
from roadaware.bench.services import PARTITION_UNIFORM
from roadaware.bench.services import PipelineConfigs
from roadaware.bench.services import build_localizers
from roadaware.bench.services import latency_queries
from roadaware.bench.services import latency_scaling
from roadaware.bench.services import replay
from roadaware.bench.services import snr_sweep
from roadaware.features.entities import FeatureSet
from roadaware.features.entities import GRADIENT
from roadaware.features.services import saliency_prefilter
from roadaware.features.services import window_feature_set
from roadaware.msvl.entities import ReferenceWindows
from roadaware.msvl.services import enumerate_positions
from roadaware.msvl.services import locate_features
from roadaware.msvl.services import road_corpus
from roadaware.scenario.services import default_desk_scenario
from roadaware.scenario.services import generate_dataset
from roadaware.scenario.services import noise_sigmas_for_snr
from roadaware.scenario.services import with_noise

pytestmark = pytest.mark.slow

SNR_DB = 30.0


@pytest.fixture(scope="module")
def configs():
    return PipelineConfigs.from_settings()


@pytest.fixture(scope="module")
def desk():
    scenario = default_desk_scenario()
    return with_noise(scenario, noise_sigmas_for_snr(scenario, SNR_DB))


@pytest.fixture(scope="module")
def localizers(desk, configs):
    return build_localizers(desk, configs, METHODS, seed=0)


@pytest.fixture(scope="module")
def test_roads(desk):
    return generate_dataset(desk, 1)


@pytest.fixture(scope="module")
def metrics(localizers, configs, test_roads):
    run_config = RunConfig(methods=METHODS, stride=5, cfels_step_m=1.0, progress=False)
    return {method: summarize(method, replay(method, localizers, configs, run_config,
                                             test_roads))
            for method in METHODS}


def full_buffers(db, dataset):
    for seq in dataset:
        for end in range(db.window_len - 1, len(seq)):
            window = seq.rss[end - db.window_len + 1:end + 1]
            yield window_feature_set(window, seq.sample_interval_m), window[-1]


def all_masks(db):
    for road in db.roads:
        yield road.mask
        for segment in road.segments:
            yield segment.mask


def test_noisy_gradients_are_never_selected(localizers):
    db = localizers.db
    gradients = set(range(GRADIENT * db.num_base_stations,
                          (GRADIENT + 1) * db.num_base_stations))
    for mask in all_masks(db):
        assert not gradients & set(mask.indices)


def test_hierarchical_search_finds_the_joint_optimum(localizers, test_roads):
    db = localizers.db
    queries = 0
    for features, current in full_buffers(db, test_roads):
        position = locate_features(features, current, db)
        assert (position.road_id, position.segment_id) == enumerate_positions(features, db)
        queries += 1
    assert queries >= 1000


def test_unselected_features_do_not_change_the_fix(desk, localizers, configs, test_roads):
    db = localizers.db
    selected = set()
    for mask in all_masks(db):
        selected.update(mask.indices)
    dropped = sorted(set(range(db.num_features)) - selected)
    assert dropped

    # Prefiltered road features are among them.
    windows = [road.references for road in db.roads]
    prefiltered = (set(range(db.num_features))
                   - set(saliency_prefilter(road_corpus(generate_dataset(desk, 0), windows),
                                            configs.features.gamma)))
    assert not prefiltered & {f for road in db.roads for f in road.mask.indices}

    def without(features):
        features = np.array(features, dtype=float)
        features[..., dropped] = np.nan
        return features

    pruned = replace(db, roads=tuple(
        replace(road, references=ReferenceWindows(ends=road.references.ends,
                                                  features=without(road.references.features)))
        for road in db.roads))

    queries = 0
    for features, current in full_buffers(db, test_roads):
        if queries == 500:
            break
        reduced = FeatureSet(values=without(features.flat).reshape(features.values.shape),
                             scope=features.scope)
        expected = locate_features(features, current, db)
        found = locate_features(reduced, current, pruned)
        assert (found.road_id, found.segment_id, found.coord) == (
            expected.road_id, expected.segment_id, expected.coord)
        queries += 1
    assert queries == 500


def test_segment_accuracy(localizers, metrics):
    msvl = metrics[METHOD_MSVL]
    residuals = [curve.fit_residual for road in localizers.db.roads
                 for segment in road.segments for curve in segment.curves]
    assert msvl.segment_accuracy >= 0.95
    assert msvl.mde_m <= 2.0 * float(np.mean(residuals))


def test_msvl_beats_the_baselines(metrics):
    msvl = metrics[METHOD_MSVL].mde_m
    for method in METHODS:
        assert msvl <= metrics[method].mde_m


def test_latency(localizers, metrics, test_roads):
    assert 5.0 * metrics[METHOD_MSVL].mean_delay_us < metrics[METHOD_CFELS].mean_delay_us

    queries = latency_queries(test_roads, localizers.db.window_len)
    rows = latency_scaling(localizers.db, queries, (2, 4, 8, 16), (2, 4, 8, 16), repeats=20)
    for axis in ("roads", "segments"):
        assert [row["r2"] for row in rows if row["axis"] == axis][0] >= 0.95


def test_snr_sweep_trend(configs):
    run_config = RunConfig(methods=(METHOD_MSVL,), sweep=SWEEP_SNR,
                           sweep_values=(0.0, 10.0, 20.0, 30.0), progress=False)
    rows = snr_sweep(default_desk_scenario(), configs, run_config)
    sp = [row for row in rows if row["partition"] == PARTITION_SP]
    uniform = [row for row in rows if row["partition"] == PARTITION_UNIFORM]
    rmse = [row["rmse_m"] for row in sp]
    assert all(math.isfinite(value) for value in rmse)
    assert sum(later > earlier for earlier, later in zip(rmse, rmse[1:])) <= 1
    sp_gap = sp[-1]["rmse_m"] - sp[-1]["crlb_m"]
    uniform_gap = uniform[-1]["rmse_m"] - uniform[-1]["crlb_m"]
    assert sp_gap <= 2.0 * uniform_gap
