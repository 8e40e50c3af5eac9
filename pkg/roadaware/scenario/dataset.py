# -*- coding: utf-8 -*-
"""
Dataset files: one row per sampled position, header
`road_id,x,y,rss_1,...,rss_K`, an empty RSS cell for a base station that was
not detected. Column rss_1 is the macro base station.
"""

import csv
import math

import numpy as np

from roadaware.base.exceptions import ParseError
from roadaware.base.logs import Logs

from .entities import RSS_MAX_DBM
from .entities import RSS_MIN_DBM
from .entities import RoadSignalSequence

# The fixed leading columns of a dataset file.
BASE_COLUMNS = ["road_id", "x", "y"]

# Coordinates keep at least this many decimal digits.
COORDINATE_DIGITS = 6

logs = Logs(name="dataset")


def format_coordinate(value):
    return np.format_float_positional(float(value), unique=True, trim="k",
                                      min_digits=COORDINATE_DIGITS)


def format_rss(value):
    return "" if math.isnan(value) else repr(float(value))


def header_for(num_base_stations):
    return BASE_COLUMNS + ["rss_%d" % (k + 1) for k in range(num_base_stations)]


def save_dataset(seqs, file_path):
    seqs = list(seqs)
    widths = {seq.num_base_stations for seq in seqs}
    if len(widths) > 1:
        raise ParseError("Sequences disagree on the number of base stations")
    num_base_stations = widths.pop() if widths else 0

    with open(file_path, "w", encoding="utf-8", newline="") as output:
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(header_for(num_base_stations))
        for seq in seqs:
            for (x, y), row in zip(seq.coords, seq.rss):
                writer.writerow([str(seq.road_id), format_coordinate(x),
                                 format_coordinate(y)] + [format_rss(v) for v in row])

    logs.info("Saved %d sequences to %s" % (len(seqs), file_path))


def parse_float(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError("malformed %s value %r" % (column, text), line=line)
    if not math.isfinite(value):
        raise ParseError("non-finite %s value %r" % (column, text), line=line)
    return value


def parse_header(header):
    if header is None:
        raise ParseError("missing header", line=1)
    if header[:3] != BASE_COLUMNS:
        raise ParseError("header must start with road_id,x,y", line=1)
    num_base_stations = len(header) - len(BASE_COLUMNS)
    if header != header_for(num_base_stations):
        raise ParseError("RSS columns must be rss_1..rss_K", line=1)
    return num_base_stations


def load_dataset(file_path):
    """Loads the sequences of a dataset file, grouping consecutive rows of
    the same road."""

    groups = []
    with open(file_path, "r", encoding="utf-8", newline="") as source:
        reader = csv.reader(source)
        num_base_stations = parse_header(next(reader, None))
        for row in reader:
            line = reader.line_num
            if len(row) != len(BASE_COLUMNS) + num_base_stations:
                raise ParseError("expected %d fields, got %d"
                                 % (len(BASE_COLUMNS) + num_base_stations, len(row)),
                                 line=line)
            try:
                road_id = int(row[0])
            except ValueError:
                raise ParseError("malformed road_id %r" % row[0], line=line)
            coord = (parse_float(row[1], line, "x"), parse_float(row[2], line, "y"))
            rss = []
            for k, cell in enumerate(row[3:]):
                if cell == "":
                    rss.append(math.nan)
                    continue
                value = parse_float(cell, line, "rss_%d" % (k + 1))
                if not RSS_MIN_DBM <= value <= RSS_MAX_DBM:
                    raise ParseError("rss_%d outside [%s, %s] dBm"
                                     % (k + 1, RSS_MIN_DBM, RSS_MAX_DBM), line=line)
                rss.append(value)
            if not groups or groups[-1][0] != road_id:
                groups.append((road_id, [], []))
            groups[-1][1].append(coord)
            groups[-1][2].append(rss)

    seqs = [RoadSignalSequence(road_id=road_id,
                               coords=np.array(coords, dtype=float).reshape(-1, 2),
                               rss=np.array(rss, dtype=float).reshape(len(coords),
                                                                      num_base_stations))
            for road_id, coords, rss in groups]
    logs.info("Loaded %d sequences from %s" % (len(seqs), file_path))
    return seqs
