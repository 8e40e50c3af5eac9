# -*- coding: utf-8 -*-

import math
from dataclasses import replace

import numpy as np

from roadaware.base.config import get_setting
from roadaware.base.exceptions import DomainError
from roadaware.base.exceptions import ScenarioError
from roadaware.base.logs import Logs
from roadaware.base.utils import json

from .entities import BAND_MACRO_4G
from .entities import BaseStation
from .entities import MIN_SEQUENCE_LEN
from .entities import NOT_DETECTED
from .entities import RSS_MAX_DBM
from .entities import RoadGeometry
from .entities import RoadSignalSequence
from .entities import Scenario

# Slack on the polyline parameter absorbing accumulated rounding.
ROUNDING_TOLERANCE = 1e-9

logs = Logs(name="scenario")


def path_loss(bs, distances):
    """Log-distance RSS of one base station at the given distances, without
    noise. Accepts scalars or arrays."""

    distances = np.asarray(distances, dtype=float)
    if np.any(distances <= 0):
        raise DomainError("Coordinate coincides with base station %s" % bs.id)
    rss = bs.p0 - 10.0 * bs.beta * np.log10(distances)
    if bs.breakpoint_m is not None:
        at_break = bs.p0 - 10.0 * bs.beta * np.log10(bs.breakpoint_m)
        far = at_break - 10.0 * bs.beta_far * np.log10(distances / bs.breakpoint_m)
        rss = np.where(distances > bs.breakpoint_m, far, rss)
    return rss


def distances_to(bs, coords):
    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    return np.hypot(coords[:, 0] - bs.position[0], coords[:, 1] - bs.position[1])


def detect(rss, floor_dbm):
    """Applies the receiver: saturation at 0 dBm and the detection floor."""

    rss = np.minimum(rss, RSS_MAX_DBM)
    return np.where(rss < floor_dbm, NOT_DETECTED, rss)


def rss_at(scenario, bs_index, coord, noise_draw=None):
    """Returns the RSS in dBm of base station `bs_index` at `coord`, or the
    not-detected sentinel below the detection floor.

    The log-distance model is not clamped at short range: closer than 1 m the
    RSS exceeds p0, and anything above 0 dBm is reported as 0 dBm. A
    coordinate on the base station itself raises DomainError.
    """

    if not 0 <= bs_index < scenario.num_base_stations:
        raise ScenarioError("Invalid base station index: %s" % bs_index)
    bs = scenario.base_stations[bs_index]
    distance = distances_to(bs, [coord])
    rss = path_loss(bs, distance) + (noise_draw or 0.0)
    return float(detect(rss, scenario.detection_floor_dbm)[0])


def resample_polyline(polyline, interval):
    """Walks the polyline placing each new sample exactly `interval` meters
    (straight-line) after the previous one. Returns an (L, 2) array."""

    points = np.asarray(polyline, dtype=float)
    current = points[0]
    samples = [current]
    segment = 0

    while True:
        found = False
        for index in range(segment, len(points) - 1):
            start = current if index == segment else points[index]
            direction = points[index + 1] - start
            offset = start - current
            a = direction.dot(direction)
            b = 2.0 * offset.dot(direction)
            c = offset.dot(offset) - interval * interval
            discriminant = b * b - 4.0 * a * c
            if a == 0 or discriminant < 0:
                continue
            # The segment start is inside the circle, so take the outer root.
            u = (-b + math.sqrt(discriminant)) / (2.0 * a)
            if 0.0 <= u <= 1.0 + ROUNDING_TOLERANCE:
                current = start + min(u, 1.0) * direction
                samples.append(current)
                segment = index
                found = True
                break
        if not found:
            break

    return np.vstack(samples)


def rss_matrix(scenario, coords, noise=None):
    """RSS of every base station at every coordinate, shape (L, K)."""

    columns = [path_loss(bs, distances_to(bs, coords)) for bs in scenario.base_stations]
    rss = np.column_stack(columns)
    if noise is not None:
        rss = rss + noise
    return detect(rss, scenario.detection_floor_dbm)


def generate_road_sequence(scenario, road_id, rng_seed):
    """Samples a road every ΔD meters and draws one noisy RSS vector per
    sample. The result depends only on (scenario, road_id, rng_seed)."""

    road = scenario.road(road_id)
    if road.length_m < MIN_SEQUENCE_LEN * road.sample_interval_m:
        raise ScenarioError("Road %s is shorter than %d sample intervals"
                            % (road_id, MIN_SEQUENCE_LEN))

    coords = resample_polyline(road.polyline, road.sample_interval_m)
    rng = np.random.default_rng([int(rng_seed), int(road_id)])
    sigmas = np.array([bs.noise_sigma for bs in scenario.base_stations])
    noise = rng.standard_normal((len(coords), len(sigmas))) * sigmas
    rss = rss_matrix(scenario, coords, noise)

    logs.debug("Generated road %s: %d records, seed %s" % (road_id, len(coords), rng_seed))
    return RoadSignalSequence(road_id=road_id, coords=coords, rss=rss,
                              sample_interval_m=road.sample_interval_m)


def generate_dataset(scenario, rng_seed=None):
    """Generates one sequence per road, in road order."""

    seed = scenario.seed if rng_seed is None else rng_seed
    return [generate_road_sequence(scenario, road.road_id, seed)
            for road in scenario.roads]


def signal_gradient(seq, j, k):
    """The RSS gradient of base station k between positions j and j + 1, in
    dB per meter (0-based j). NaN when either RSS is not detected."""

    if not 0 <= j < len(seq) - 1:
        raise ScenarioError("Gradient index %s outside [0, %d)" % (j, len(seq) - 1))
    first, second = seq.rss[j, k], seq.rss[j + 1, k]
    distance = math.hypot(*(seq.coords[j + 1] - seq.coords[j]))
    if distance == 0:
        raise DomainError("Zero distance between positions %d and %d" % (j, j + 1))
    if math.isnan(first) or math.isnan(second):
        return NOT_DETECTED
    return float((second - first) / distance)


def gradient_matrix(seq):
    """All gradients of a sequence, shape (L - 1, K)."""

    steps = seq.steps()
    if np.any(steps == 0):
        raise DomainError("Road %s has coincident consecutive positions" % seq.road_id)
    return np.diff(seq.rss, axis=0) / steps[:, None]


def snr_db(signal_variance, noise_variance):
    if not signal_variance > 0 or not noise_variance > 0:
        raise DomainError("SNR needs positive variances")
    return 10.0 * math.log10(signal_variance / noise_variance)


def noise_sigmas_for_snr(scenario, target_snr_db):
    """Per base station noise std giving `target_snr_db`, where the signal
    variance is that of the noiseless RSS along all roads."""

    coords = np.vstack([resample_polyline(road.polyline, road.sample_interval_m)
                        for road in scenario.roads])
    clean = rss_matrix(scenario, coords)
    sigmas = []
    for k in range(scenario.num_base_stations):
        column = clean[:, k]
        variance = np.var(column[np.isfinite(column)]) if np.isfinite(column).any() else 0.0
        sigmas.append(math.sqrt(variance / 10.0 ** (target_snr_db / 10.0)))
    return sigmas


def with_noise(scenario, sigmas):
    """A copy of the scenario with the given per base station noise std."""

    base_stations = [replace(bs, noise_sigma=float(sigma))
                     for bs, sigma in zip(scenario.base_stations, sigmas)]
    return Scenario(base_stations=base_stations, roads=scenario.roads,
                    seed=scenario.seed, detection_floor_dbm=scenario.detection_floor_dbm)


def with_base_stations(scenario, count):
    """A copy of the scenario keeping only the first `count` base stations."""

    if not 1 <= count <= scenario.num_base_stations:
        raise ScenarioError("Cannot keep %s of %d base stations"
                            % (count, scenario.num_base_stations))
    return Scenario(base_stations=scenario.base_stations[:count], roads=scenario.roads,
                    seed=scenario.seed, detection_floor_dbm=scenario.detection_floor_dbm)


def with_sample_interval(scenario, interval):
    roads = [RoadGeometry(road.road_id, road.polyline, interval) for road in scenario.roads]
    return Scenario(base_stations=scenario.base_stations, roads=roads,
                    seed=scenario.seed, detection_floor_dbm=scenario.detection_floor_dbm)


def default_desk_scenario(seed=0, noise_sigma=1.0, sample_interval_m=1.0,
                          detection_floor_dbm=None, overrides=None):
    """A 600 m x 600 m scene: four roads around a central block, a macro BS
    inside the block and five small cells along the roads.

    Without `detection_floor_dbm` the floor is the
    SCENARIO_DETECTION_FLOOR_DBM setting.
    """

    if detection_floor_dbm is None:
        detection_floor_dbm = get_setting("SCENARIO_DETECTION_FLOOR_DBM", float, overrides)

    macro = BaseStation.from_preset(1, (300.0, 300.0), "4G-urban", noise_sigma)
    small_positions = [(200.0, 60.0), (540.0, 250.0), (380.0, 540.0),
                       (60.0, 380.0), (300.0, 140.0)]
    small = [BaseStation.from_preset(index + 2, position, "5G-urban", noise_sigma)
             for index, position in enumerate(small_positions)]
    corners = [(100.0, 100.0), (500.0, 100.0), (500.0, 500.0), (100.0, 500.0)]
    roads = [RoadGeometry(index + 1, (corners[index], corners[(index + 1) % 4]),
                          sample_interval_m)
             for index in range(4)]
    return Scenario(base_stations=[macro] + small, roads=roads, seed=seed,
                    detection_floor_dbm=detection_floor_dbm)


def desk_scenario_from_settings(seed=0, overrides=None):
    return default_desk_scenario(
        seed=seed,
        sample_interval_m=get_setting("SCENARIO_SAMPLE_INTERVAL_M", float, overrides),
        overrides=overrides)


def scenario_to_dict(scenario):
    return {
        "seed": scenario.seed,
        "detection_floor_dbm": scenario.detection_floor_dbm,
        "base_stations": [{
            "id": bs.id,
            "position": list(bs.position),
            "band": bs.band,
            "p0": bs.p0,
            "beta": bs.beta,
            "noise_sigma": bs.noise_sigma,
            "breakpoint_m": bs.breakpoint_m,
            "beta_far": bs.beta_far,
        } for bs in scenario.base_stations],
        "roads": [{
            "road_id": road.road_id,
            "polyline": [list(point) for point in road.polyline],
            "sample_interval_m": road.sample_interval_m,
        } for road in scenario.roads],
    }


def scenario_from_dict(data, detection_floor_dbm=None, overrides=None):
    """A scenario from its JSON document. A document without a detection
    floor gets `detection_floor_dbm`, or else the setting."""

    if detection_floor_dbm is None:
        detection_floor_dbm = get_setting("SCENARIO_DETECTION_FLOOR_DBM", float, overrides)
    try:
        base_stations = []
        for item in data["base_stations"]:
            if "preset" in item:
                bs = BaseStation.from_preset(item["id"], tuple(item["position"]),
                                             item["preset"], item.get("noise_sigma", 0.0))
            else:
                bs = BaseStation(id=int(item["id"]), position=tuple(item["position"]),
                                 band=item.get("band", BAND_MACRO_4G),
                                 p0=float(item["p0"]), beta=float(item["beta"]),
                                 noise_sigma=float(item.get("noise_sigma", 0.0)),
                                 breakpoint_m=item.get("breakpoint_m"),
                                 beta_far=item.get("beta_far"))
            base_stations.append(bs)
        roads = [RoadGeometry(road_id=int(item["road_id"]),
                              polyline=tuple(tuple(point) for point in item["polyline"]),
                              sample_interval_m=float(item.get("sample_interval_m", 1.0)))
                 for item in data["roads"]]
        return Scenario(base_stations=base_stations, roads=roads,
                        seed=int(data.get("seed", 0)),
                        detection_floor_dbm=float(data.get("detection_floor_dbm",
                                                           detection_floor_dbm)))
    except (KeyError, TypeError, ValueError) as error:
        if isinstance(error, ScenarioError):
            raise
        raise ScenarioError("Malformed scenario: %s" % error)


def save_scenario(scenario, file_path):
    json.dump_file(scenario_to_dict(scenario), file_path)


def load_scenario(file_path, detection_floor_dbm=None, overrides=None):
    try:
        data = json.load_file(file_path)
    except ValueError as error:
        raise ScenarioError("Unreadable scenario file %s: %s" % (file_path, error))
    return scenario_from_dict(data, detection_floor_dbm, overrides)
