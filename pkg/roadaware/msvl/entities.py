# -*- coding: utf-8 -*-

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np

from roadaware.base.config import get_setting
from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import LocalizationError
from roadaware.base.exceptions import ProfileError
from roadaware.curvefit.entities import FittedCurve
from roadaware.features.entities import NormalizationParams
from roadaware.features.entities import SelectionMask
from roadaware.scenario.entities import RoadSignalSequence
from roadaware.segmentation.entities import SegmentationConfig

# The version tag of profile files.
PROFILE_SCHEMA = "roadaware-profile/2"

# Segment prior constructions.
PRIOR_UNIFORM = "uniform"
PRIOR_LENGTH = "length"
PRIORS = (PRIOR_UNIFORM, PRIOR_LENGTH)

# Slack on the sum of a road's segment priors.
PRIOR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class LocatorConfig:
    buffer_capacity: int = 40
    prior: str = PRIOR_UNIFORM
    # Step between the end positions of consecutive reference windows.
    reference_stride: int = 1
    # Trailing records the current RSS is fitted over.
    rss_span: int = 10

    def __post_init__(self):
        if self.buffer_capacity < 3:
            raise ConfigurationError("buffer capacity must be at least 3")
        if self.prior not in PRIORS:
            raise ConfigurationError("prior must be one of %s" % ", ".join(PRIORS))
        if self.reference_stride < 1:
            raise ConfigurationError("reference stride must be at least 1")
        if self.rss_span < 1:
            raise ConfigurationError("RSS span must be at least 1")

    @classmethod
    def from_settings(cls, overrides=None):
        return cls(buffer_capacity=get_setting("MSVL_BUFFER_CAPACITY", int, overrides),
                   prior=get_setting("MSVL_PRIOR", str, overrides),
                   reference_stride=get_setting("MSVL_REFERENCE_STRIDE", int, overrides),
                   rss_span=get_setting("MSVL_RSS_SPAN", int, overrides))


@dataclass(frozen=True, eq=False)
class ReferenceWindows:
    """Raw feature sets of the training windows of one road, one flattened
    row per window, keyed by the road position the window ends at."""
    ends: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        ends = np.array(self.ends, dtype=np.int64, copy=True).reshape(-1)
        features = np.array(self.features, dtype=float, copy=True)
        if features.ndim != 2 or features.shape[0] != ends.size:
            raise ProfileError("Reference windows need one feature row each")
        if ends.size == 0:
            raise ProfileError("A road needs at least one reference window")
        if np.any(np.diff(ends) <= 0):
            raise ProfileError("Reference windows must end at increasing positions")
        for array in (ends, features):
            array.setflags(write=False)
        object.__setattr__(self, "ends", ends)
        object.__setattr__(self, "features", features)

    def __len__(self):
        return int(self.ends.size)

    def between(self, start, end):
        """Rows of the windows ending at positions start..end."""

        return np.flatnonzero((self.ends >= start) & (self.ends <= end))


@dataclass(frozen=True, eq=False)
class SegmentEntry:
    segment_id: int
    start: int
    end: int
    mask: SelectionMask
    curves: Tuple[FittedCurve, ...]
    prior: float
    midpoint: Tuple[float, float]

    @property
    def length(self):
        return self.end - self.start + 1


@dataclass(frozen=True, eq=False)
class RoadEntry:
    """One road of the profile.

    Road matching compares a query with every reference window, normalized
    with `normalization` and masked with `mask`. A segment compares it with
    the windows ending inside the segment, normalized with
    `segment_normalization` and masked with the segment's own mask.
    """
    road_id: int
    mask: SelectionMask
    normalization: NormalizationParams
    segment_normalization: NormalizationParams
    references: ReferenceWindows
    segments: Tuple[SegmentEntry, ...]
    penalty: Optional[float] = None

    def __post_init__(self):
        segments = tuple(sorted(self.segments, key=lambda segment: segment.segment_id))
        if not segments:
            raise ProfileError("Road %s has no segment" % self.road_id)
        if len({s.segment_id for s in segments}) != len(segments):
            raise ProfileError("Road %s has duplicate segment ids" % self.road_id)
        total = math.fsum(segment.prior for segment in segments)
        if abs(total - 1.0) > PRIOR_TOLERANCE:
            raise ProfileError("Road %s: segment priors sum to %r" % (self.road_id, total))
        for segment in segments:
            if not self.references.between(segment.start, segment.end).size:
                raise ProfileError("Road %s: segment %s has no reference window"
                                   % (self.road_id, segment.segment_id))
        object.__setattr__(self, "segments", segments)
        # Normalized once, compared on every query.
        object.__setattr__(self, "road_values",
                           self.normalization.normalize(self.references.features))
        object.__setattr__(self, "segment_values",
                           self.segment_normalization.normalize(self.references.features))

    def segment_rows(self, segment):
        return self.references.between(segment.start, segment.end)

    def segment(self, segment_id):
        for segment in self.segments:
            if segment.segment_id == segment_id:
                return segment
        raise ProfileError("Road %s has no segment %s" % (self.road_id, segment_id))


@dataclass(frozen=True, eq=False)
class RoadProfileDB:
    """The offline product: per road its reference windows, masks and
    normalization parameters, per segment its mask, prior and fitted
    curves."""
    scenario_digest: str
    num_base_stations: int
    sample_interval_m: float
    segmentation: SegmentationConfig
    roads: Tuple[RoadEntry, ...]
    # Positions per reference window: the buffer capacity it was built for.
    window_len: int = 40
    schema: str = PROFILE_SCHEMA

    def __post_init__(self):
        if self.schema != PROFILE_SCHEMA:
            raise ProfileError("Unsupported profile schema: %s" % self.schema)
        roads = tuple(sorted(self.roads, key=lambda road: road.road_id))
        if not roads:
            raise ProfileError("A profile needs at least one road")
        if len({road.road_id for road in roads}) != len(roads):
            raise ProfileError("Duplicate road ids in profile")
        object.__setattr__(self, "roads", roads)

    @property
    def num_features(self):
        return self.roads[0].mask.size

    @property
    def num_references(self):
        return sum(len(road.references) for road in self.roads)

    def road(self, road_id):
        for road in self.roads:
            if road.road_id == road_id:
                return road
        raise ProfileError("Unknown road: %s" % road_id)


class OnlineBuffer:
    """The trailing RSS vectors seen by the vehicle, without ground truth."""

    def __init__(self, capacity, sample_interval_m, min_segment_len=3):
        if capacity < max(min_segment_len, 3):
            raise ConfigurationError("buffer capacity %d below the minimum segment length %d"
                                     % (capacity, min_segment_len))
        if not sample_interval_m > 0:
            raise ConfigurationError("sample interval must be positive")
        self.capacity = capacity
        self.sample_interval_m = float(sample_interval_m)
        self.records = deque(maxlen=capacity)

    def __len__(self):
        return len(self.records)

    def push(self, rss):
        self.records.append(np.array(rss, dtype=float))

    def extend(self, rows):
        for rss in rows:
            self.push(rss)

    def clear(self):
        self.records.clear()

    @property
    def is_full(self):
        return len(self.records) == self.capacity

    @property
    def rss(self):
        if not self.records:
            raise LocalizationError("The buffer is empty")
        return np.vstack(self.records)

    @property
    def latest(self):
        return self.records[-1]

    def as_sequence(self):
        """The buffer as a straight sequence sampled every interval meters."""

        positions = np.arange(len(self.records)) * self.sample_interval_m
        coords = np.column_stack([positions, np.zeros_like(positions)])
        return RoadSignalSequence(road_id=0, coords=coords, rss=self.rss,
                                  sample_interval_m=self.sample_interval_m)


@dataclass(frozen=True)
class MultiScalePosition:
    road_id: Optional[int]
    segment_id: Optional[int]
    coord: Optional[Tuple[float, float]]
    posterior: float
    latency_us: float
    road_probability: float = 0.0
    comparisons: int = 0

    @property
    def located(self):
        return self.road_id is not None

    @classmethod
    def unlocatable(cls, latency_us, comparisons=0):
        return cls(road_id=None, segment_id=None, coord=None, posterior=0.0,
                   latency_us=latency_us, comparisons=comparisons)
