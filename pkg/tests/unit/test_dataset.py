# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

from roadaware.base.exceptions import ParseError
from roadaware.scenario.dataset import load_dataset
from roadaware.scenario.dataset import save_dataset

from ..fixtures import make_sequence


def test_saved_dataset_layout(tmpdir):
    seq = make_sequence(4, [[-60.5, -61.25, -62.0], [-90.0, math.nan, -91.0]])
    file_path = str(tmpdir.join("data.csv"))
    save_dataset([seq], file_path)
    lines = open(file_path).read().splitlines()
    assert lines[0] == "road_id,x,y,rss_1,rss_2"
    assert lines[1] == "4,0.000000,0.000000,-60.5,-90.0"
    assert lines[2] == "4,1.000000,0.000000,-61.25,"


def test_dataset_file_keeps_values(tmpdir, two_roads):
    road = make_sequence(3, [[-60.123456789, -61.0, -62.0], [math.nan, -80.0, -81.5]],
                         y=2.5)
    file_path = str(tmpdir.join("data.csv"))
    save_dataset(two_roads + [road], file_path)
    loaded = load_dataset(file_path)
    assert [seq.road_id for seq in loaded] == [1, 2, 3]
    assert loaded[2] == road
    assert np.array_equal(loaded[0].rss, two_roads[0].rss)


def write(tmpdir, text):
    file_path = tmpdir.join("data.csv")
    file_path.write(text)
    return str(file_path)


def test_bad_header(tmpdir):
    with pytest.raises(ParseError) as error:
        load_dataset(write(tmpdir, "road,x,y,rss_1\n1,0,0,-50\n"))
    assert error.value.line == 1


def test_malformed_value(tmpdir):
    with pytest.raises(ParseError) as error:
        load_dataset(write(tmpdir, "road_id,x,y,rss_1\n1,0,0,-50\n1,1,0,loud\n"))
    assert error.value.line == 3


def test_rss_out_of_range(tmpdir):
    with pytest.raises(ParseError):
        load_dataset(write(tmpdir, "road_id,x,y,rss_1\n1,0,0,12\n"))


def test_wrong_field_count(tmpdir):
    with pytest.raises(ParseError) as error:
        load_dataset(write(tmpdir, "road_id,x,y,rss_1,rss_2\n1,0,0,-50\n"))
    assert error.value.line == 2


def test_large_dataset_round_trip(tmpdir, rng):
    roads = []
    for road_id in range(1, 13):
        rss = rng.uniform(-120.0, -30.0, (1161, 6))
        rss[rng.random(rss.shape) < 0.05] = math.nan
        roads.append(make_sequence(road_id, rss.T, y=12.345 * road_id))
    file_path = str(tmpdir.join("data.csv"))
    save_dataset(roads, file_path)
    assert len(open(file_path).read().splitlines()) == 13932 + 1
    loaded = load_dataset(file_path)
    assert len(loaded) == 12
    for original, copy in zip(roads, loaded):
        assert copy == original
