# -*- coding: utf-8 -*-

import math
from dataclasses import dataclass
from dataclasses import field
from typing import Optional
from typing import Tuple

import numpy as np

from roadaware.base.config import get_setting
from roadaware.base.exceptions import ScenarioError

# The two HetNet tiers.
BAND_MACRO_4G = "macro-4G"
BAND_SMALL_5G = "small-5G"
BANDS = (BAND_MACRO_4G, BAND_SMALL_5G)

# Path-loss presets. The small cells attenuate faster through a lower p0.
PATH_LOSS_PRESETS = {
    "4G-urban": {"band": BAND_MACRO_4G, "p0": -10.0, "beta": 3.5},
    "5G-urban": {"band": BAND_SMALL_5G, "p0": -25.0, "beta": 3.0},
}

# The not-detected sentinel. It is never replaced by a numeric floor.
NOT_DETECTED = math.nan

# Valid range of a detected RSS value in dBm. Stronger values saturate.
RSS_MIN_DBM = -150.0
RSS_MAX_DBM = 0.0

# The fewest positions a road sequence may have.
MIN_SEQUENCE_LEN = 3

# Relative tolerance on the spacing between consecutive samples.
SPACING_RTOL = 0.01


@dataclass(frozen=True)
class BaseStation:
    id: int
    position: Tuple[float, float]
    band: str
    p0: float
    beta: float
    noise_sigma: float = 0.0
    # Dual-slope path loss: beyond breakpoint_m the exponent is beta_far.
    breakpoint_m: Optional[float] = None
    beta_far: Optional[float] = None

    def __post_init__(self):
        if self.band not in BANDS:
            raise ScenarioError("BS %s: unknown band %r" % (self.id, self.band))
        if not self.beta > 0:
            raise ScenarioError("BS %s: beta must be positive" % self.id)
        if not self.noise_sigma >= 0:
            raise ScenarioError("BS %s: noise_sigma must be nonnegative" % self.id)
        if (self.breakpoint_m is None) != (self.beta_far is None):
            raise ScenarioError("BS %s: breakpoint_m and beta_far go together"
                                % self.id)
        if self.breakpoint_m is not None:
            if not self.breakpoint_m > 0 or not self.beta_far > 0:
                raise ScenarioError("BS %s: invalid dual-slope parameters"
                                    % self.id)
        object.__setattr__(self, "position",
                           (float(self.position[0]), float(self.position[1])))

    @property
    def is_macro(self):
        return self.band == BAND_MACRO_4G

    @classmethod
    def from_preset(cls, id, position, preset, noise_sigma=0.0):
        try:
            params = PATH_LOSS_PRESETS[preset]
        except KeyError:
            raise ScenarioError("Unknown path-loss preset: %s" % preset)
        return cls(id=id, position=position, noise_sigma=noise_sigma, **params)


@dataclass(frozen=True)
class RoadGeometry:
    road_id: int
    polyline: Tuple[Tuple[float, float], ...]
    sample_interval_m: float = 1.0

    def __post_init__(self):
        polyline = tuple((float(x), float(y)) for x, y in self.polyline)
        if len(polyline) < 2:
            raise ScenarioError("Road %s needs at least 2 waypoints" % self.road_id)
        for (x0, y0), (x1, y1) in zip(polyline, polyline[1:]):
            if x0 == x1 and y0 == y1:
                raise ScenarioError("Road %s has repeated waypoints" % self.road_id)
        if not self.sample_interval_m > 0:
            raise ScenarioError("Road %s: sample interval must be positive"
                                % self.road_id)
        object.__setattr__(self, "polyline", polyline)

    @property
    def length_m(self):
        points = np.asarray(self.polyline)
        return float(np.hypot(*np.diff(points, axis=0).T).sum())


@dataclass(frozen=True)
class Scenario:
    base_stations: Tuple[BaseStation, ...]
    roads: Tuple[RoadGeometry, ...]
    seed: int = 0
    # The detection floor of the receiver in dBm; None reads the setting.
    detection_floor_dbm: Optional[float] = None

    def __post_init__(self):
        base_stations = tuple(self.base_stations)
        roads = tuple(self.roads)
        if not base_stations:
            raise ScenarioError("A scenario needs at least one base station")
        if not roads:
            raise ScenarioError("A scenario needs at least one road")
        macros = [bs for bs in base_stations if bs.is_macro]
        if len(macros) != 1:
            raise ScenarioError("A scenario needs exactly one macro BS, got %d"
                                % len(macros))
        if not base_stations[0].is_macro:
            raise ScenarioError("The macro BS must be listed first")
        if len({bs.id for bs in base_stations}) != len(base_stations):
            raise ScenarioError("Base station ids must be unique")
        if len({road.road_id for road in roads}) != len(roads):
            raise ScenarioError("Road ids must be unique")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ScenarioError("The seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "base_stations", base_stations)
        object.__setattr__(self, "roads", roads)
        object.__setattr__(self, "seed", int(self.seed))
        if self.detection_floor_dbm is None:
            object.__setattr__(self, "detection_floor_dbm",
                               get_setting("SCENARIO_DETECTION_FLOOR_DBM", float))
        object.__setattr__(self, "detection_floor_dbm", float(self.detection_floor_dbm))

    @property
    def num_base_stations(self):
        return len(self.base_stations)

    def road(self, road_id):
        for road in self.roads:
            if road.road_id == road_id:
                return road
        raise ScenarioError("Unknown road: %s" % road_id)

    def bounds(self):
        """Bounding box (xmin, ymin, xmax, ymax) of all roads."""

        points = np.asarray([p for road in self.roads for p in road.polyline])
        xmin, ymin = points.min(axis=0)
        xmax, ymax = points.max(axis=0)
        return (float(xmin), float(ymin), float(xmax), float(ymax))


@dataclass(frozen=True)
class SignalRecord:
    coord: Tuple[float, float]
    rss: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class RoadSignalSequence:
    """The ordered RSS vectors of one road with their ground-truth coordinates.

    `coords` is an (L, 2) array and `rss` an (L, K) array in dBm, NaN where
    the base station is not detected.
    """
    road_id: int
    coords: np.ndarray
    rss: np.ndarray
    sample_interval_m: Optional[float] = field(default=None)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float, copy=True).reshape(-1, 2)
        rss = np.array(self.rss, dtype=float, copy=True)
        if rss.ndim == 1:
            rss = rss.reshape(len(coords), -1)
        if rss.shape[0] != coords.shape[0]:
            raise ScenarioError("Road %s: %d coordinates for %d RSS rows"
                                % (self.road_id, coords.shape[0], rss.shape[0]))
        finite = rss[np.isfinite(rss)]
        if finite.size and (finite.min() < RSS_MIN_DBM or finite.max() > RSS_MAX_DBM):
            raise ScenarioError("Road %s: RSS outside [%s, %s] dBm"
                                % (self.road_id, RSS_MIN_DBM, RSS_MAX_DBM))
        coords.setflags(write=False)
        rss.setflags(write=False)
        object.__setattr__(self, "road_id", int(self.road_id))
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "rss", rss)

    def __len__(self):
        return self.coords.shape[0]

    def __eq__(self, other):
        if not isinstance(other, RoadSignalSequence):
            return NotImplemented
        return (self.road_id == other.road_id
                and self.coords.shape == other.coords.shape
                and self.rss.shape == other.rss.shape
                and np.array_equal(self.coords, other.coords)
                and np.array_equal(self.rss, other.rss, equal_nan=True))

    __hash__ = None

    @property
    def num_base_stations(self):
        return self.rss.shape[1]

    @property
    def records(self):
        return [SignalRecord(coord=(float(x), float(y)), rss=tuple(map(float, row)))
                for (x, y), row in zip(self.coords, self.rss)]

    def slice(self, start, end):
        """The sub-sequence of positions start..end, both inclusive."""

        return RoadSignalSequence(road_id=self.road_id,
                                  coords=self.coords[start:end + 1],
                                  rss=self.rss[start:end + 1],
                                  sample_interval_m=self.sample_interval_m)

    def reversed(self):
        return RoadSignalSequence(road_id=self.road_id, coords=self.coords[::-1],
                                  rss=self.rss[::-1],
                                  sample_interval_m=self.sample_interval_m)

    def restricted(self, num_base_stations):
        """The sequence seen by the first `num_base_stations` base stations."""

        return RoadSignalSequence(road_id=self.road_id, coords=self.coords,
                                  rss=self.rss[:, :num_base_stations],
                                  sample_interval_m=self.sample_interval_m)

    def steps(self):
        """Euclidean distances between consecutive positions."""

        return np.hypot(*np.diff(self.coords, axis=0).T)

    def validate(self):
        """Checks the length and spacing invariants of a road sequence."""

        if len(self) < MIN_SEQUENCE_LEN:
            raise ScenarioError("Road %s has %d positions, need %d"
                                % (self.road_id, len(self), MIN_SEQUENCE_LEN))
        if self.sample_interval_m:
            steps = self.steps()
            if np.any(np.abs(steps - self.sample_interval_m)
                      > SPACING_RTOL * self.sample_interval_m):
                raise ScenarioError("Road %s: samples are not %s m apart"
                                    % (self.road_id, self.sample_interval_m))
        return self
