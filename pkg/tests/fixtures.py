# -*- coding: utf-8 -*-

import numpy as np
import pytest

from roadaware.curvefit.entities import CurveFitConfig
from roadaware.features.entities import SFConfig
from roadaware.scenario.entities import RoadSignalSequence
from roadaware.segmentation.entities import SegmentationConfig

# Positions per road of the hand-built dataset.
ROAD_LEN = 50

# Road 1 peaks at this position: its gradient flips between 24 and 25.
PEAK = 25


def make_sequence(road_id, columns, y=0.0, interval=1.0):
    """A straight road along x, one RSS column per base station."""

    rss = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    x = np.arange(rss.shape[0]) * interval
    coords = np.column_stack([x, np.full_like(x, y)])
    return RoadSignalSequence(road_id=road_id, coords=coords, rss=rss,
                              sample_interval_m=interval)


def peak_column(length, peak, top=-35.0, slope=1.0):
    j = np.arange(length)
    return top - slope * np.abs(j - peak)


def two_road_dataset():
    """Road 1: the macro rises 1 dB/m up to the peak then falls, the small
    cell is flat. Road 2: the macro is flat, the small cell falls 0.5 dB/m."""

    j = np.arange(ROAD_LEN)
    road_1 = make_sequence(1, [peak_column(ROAD_LEN, PEAK), np.full(ROAD_LEN, -80.0)])
    road_2 = make_sequence(2, [np.full(ROAD_LEN, -70.0), -50.0 - 0.5 * j], y=10.0)
    return [road_1, road_2]


@pytest.fixture
def two_roads():
    return two_road_dataset()


@pytest.fixture
def seg_config():
    return SegmentationConfig()


@pytest.fixture
def sf_config():
    return SFConfig()


@pytest.fixture
def curve_config():
    return CurveFitConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(7)
