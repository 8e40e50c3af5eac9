# -*- coding: utf-8 -*-

import hashlib
import math
from collections import namedtuple

import numpy as np
from numpy.polynomial import Polynomial

from roadaware.base.exceptions import CurveFitError
from roadaware.base.exceptions import FeatureError
from roadaware.base.exceptions import ProfileError
from roadaware.base.exceptions import RoadawareError
from roadaware.base.exceptions import SegmentationError
from roadaware.base.logs import Logs
from roadaware.base.utils.time import elapsed_us
from roadaware.base.utils.time import monotonic_us
from roadaware.curvefit.services import fit_segment_curves
from roadaware.curvefit.services import map_coordinate
from roadaware.features.entities import FeatureSet
from roadaware.features.entities import NUM_FEATURE_KINDS
from roadaware.features.services import extract_feature_set
from roadaware.features.services import make_corpus
from roadaware.features.services import quiet_features
from roadaware.features.services import sample_normalization
from roadaware.features.services import select_salient
from roadaware.features.services import window_feature_set
from roadaware.features.services import window_noise_stds
from roadaware.scenario.entities import MIN_SEQUENCE_LEN
from roadaware.segmentation.services import bottom_up_partition
from roadaware.segmentation.services import rss_noise_sigmas

from .entities import LocatorConfig
from .entities import MultiScalePosition
from .entities import PRIOR_LENGTH
from .entities import ReferenceWindows
from .entities import RoadEntry
from .entities import RoadProfileDB
from .entities import SegmentEntry

logs = Logs(name="msvl")

# The outcome of comparing a user vector with a stored one.
Match = namedtuple("Match", ["probability", "distance", "comparisons", "comparable"])

SegmentPosterior = namedtuple("SegmentPosterior", ["probabilities", "log_weights",
                                                   "distances", "comparisons", "fallback"])


def scenario_digest(dataset):
    """sha256 over the road ids, coordinates and RSS of a dataset."""

    digest = hashlib.sha256()
    for seq in sorted(dataset, key=lambda seq: seq.road_id):
        digest.update(str(seq.road_id).encode("ascii"))
        digest.update(np.ascontiguousarray(seq.coords, dtype="<f8").tobytes())
        # One canonical NaN pattern, whatever the payload bits.
        rss = np.where(np.isfinite(seq.rss), seq.rss, np.nan)
        digest.update(np.ascontiguousarray(rss, dtype="<f8").tobytes())
    return digest.hexdigest()


def reference_windows(seq, window_len, stride=1, partition=None):
    """Feature sets of the windows of `window_len` positions ending every
    `stride` positions of a road, plus at its last position and at every
    segment end of `partition`. Near the start of the road the windows are
    cut short at position 0."""

    length = len(seq)
    ends = set(range(MIN_SEQUENCE_LEN - 1, length, stride))
    ends.add(length - 1)
    if partition is not None:
        ends.update(end for _, end in partition.segment_bounds)

    kept, rows = [], []
    for end in sorted(ends):
        start = max(0, end - window_len + 1)
        try:
            rows.append(extract_feature_set(seq, start, end).flat)
        except FeatureError as error:
            logs.debug("Road %s: no reference window ending at %d: %s"
                       % (seq.road_id, end, error))
            continue
        kept.append(end)
    if not rows:
        raise ProfileError("Road %s: no reference window" % seq.road_id)
    return ReferenceWindows(ends=kept, features=np.vstack(rows))


def _reference_sets(references, num_base_stations, scope, rows=None):
    rows = range(len(references)) if rows is None else rows
    return [FeatureSet(values=references.features[row].reshape(NUM_FEATURE_KINDS,
                                                                num_base_stations),
                       scope=scope)
            for row in rows]


def road_corpus(dataset, references):
    """The road-scale corpus: one class per road, its own feature set as the
    primary sample and its reference windows as extra samples."""

    entries = []
    for seq, windows in zip(dataset, references):
        scope = (seq.road_id,)
        entries.append((extract_feature_set(seq, scope=scope),
                        _reference_sets(windows, seq.num_base_stations, scope)))
    return make_corpus(entries)


def segment_corpus(seq, partition, references):
    """The segment-scale corpus of one road: one class per segment, with the
    reference windows ending inside it as extra samples."""

    entries = []
    for segment_id, (start, end) in enumerate(partition.segment_bounds, start=1):
        scope = (seq.road_id, segment_id)
        entries.append((extract_feature_set(seq, start, end, scope=scope),
                        _reference_sets(references, seq.num_base_stations, scope,
                                        references.between(start, end))))
    return make_corpus(entries)


def _select(corpus, sf_config, available, memo):
    # Masks only depend on the corpus and the candidate set.
    key = tuple(available)
    if key not in memo:
        memo[key] = select_salient(corpus, sf_config, available=available)
    return memo[key].mask


def _quiet(available, quiet):
    # Noisy features are left out unless nothing else is available.
    kept = tuple(f for f in available if f in quiet)
    return kept or tuple(available)


def _priors(lengths, prior):
    if prior == PRIOR_LENGTH:
        total = math.fsum(lengths)
        return [length / total for length in lengths]
    return [1.0 / len(lengths)] * len(lengths)


def _sample_interval(dataset):
    intervals = [seq.sample_interval_m for seq in dataset if seq.sample_interval_m]
    if intervals:
        return float(intervals[0])
    steps = np.concatenate([seq.steps() for seq in dataset])
    return float(np.median(steps))


def build_profile_db(dataset, seg_config, sf_config, curve_config, locator=None):
    """Runs segmentation, reference window extraction, salient feature
    selection and curve fitting over every road sequence of a dataset.

    `locator` sets the segment prior and the length and stride of the
    reference windows; the windows should be as long as the online buffer.
    """

    locator = locator or LocatorConfig()
    dataset = sorted(dataset, key=lambda seq: seq.road_id)
    if not dataset:
        raise ProfileError("A profile needs at least one road sequence")
    if len({seq.road_id for seq in dataset}) != len(dataset):
        raise ProfileError("Duplicate road ids in the dataset")
    num_base_stations = dataset[0].num_base_stations
    if any(seq.num_base_stations != num_base_stations for seq in dataset):
        raise ProfileError("Road sequences disagree on the number of base stations")
    if seg_config.min_segment_len < MIN_SEQUENCE_LEN:
        raise ProfileError("Segments need %d positions for feature extraction"
                           % MIN_SEQUENCE_LEN)

    partitions, references = [], []
    for seq in dataset:
        try:
            seq.validate()
            partitions.append(bottom_up_partition(seq, seg_config))
            references.append(reference_windows(seq, locator.buffer_capacity,
                                                locator.reference_stride,
                                                partitions[-1]))
        except RoadawareError as error:
            raise error.with_context("road %s" % seq.road_id)
        logs.info("Road %s: %d positions, %d segments, %d reference windows"
                  % (seq.road_id, len(seq), partitions[-1].num_segments,
                     len(references[-1])))

    interval = _sample_interval(dataset)
    noise = [window_noise_stds(rss_noise_sigmas(seq), locator.buffer_capacity, interval)
             for seq in dataset]
    corpus = road_corpus(dataset, references)
    road_quiet = set(quiet_features(corpus.values, np.median(noise, axis=0),
                                    sf_config.max_noise_ratio))
    road_memo = {}

    roads = []
    for seq, partition, windows, road_noise in zip(dataset, partitions, references, noise):
        road_set = extract_feature_set(seq, scope=(seq.road_id,))
        road_mask = _select(corpus, sf_config, _quiet(road_set.available(), road_quiet),
                            road_memo)

        segments_corpus = segment_corpus(seq, partition, windows)
        segment_quiet = set(quiet_features(segments_corpus.values, road_noise,
                                           sf_config.max_noise_ratio))
        segment_memo = {}
        priors = _priors(partition.segment_lengths(), locator.prior)

        segments = []
        for segment_id, (start, end) in enumerate(partition.segment_bounds, start=1):
            scope = (seq.road_id, segment_id)
            segment_set = extract_feature_set(seq, start, end, scope=scope)
            mask = _select(segments_corpus, sf_config,
                           _quiet(segment_set.available(), segment_quiet), segment_memo)
            try:
                curves = fit_segment_curves(seq.slice(start, end), curve_config.order,
                                            scope=scope, margin=curve_config.bbox_margin,
                                            skip_degenerate=True)
            except CurveFitError as error:
                raise error.with_context("road %s segment %s" % scope)
            middle = seq.coords[(start + end) // 2]
            segments.append(SegmentEntry(
                segment_id=segment_id, start=start, end=end, mask=mask,
                curves=tuple(curves), prior=priors[segment_id - 1],
                midpoint=(float(middle[0]), float(middle[1]))))

        # Each road is normalized over its own windows.
        roads.append(RoadEntry(road_id=seq.road_id, mask=road_mask,
                               normalization=sample_normalization(windows.features),
                               segment_normalization=sample_normalization(
                                   segments_corpus.values),
                               references=windows, segments=tuple(segments),
                               penalty=partition.penalty))

    return RoadProfileDB(scenario_digest=scenario_digest(dataset),
                         num_base_stations=num_base_stations,
                         sample_interval_m=interval,
                         segmentation=seg_config, roads=tuple(roads),
                         window_len=locator.buffer_capacity)


def masked_distances(user_values, reference_values, mask):
    """Euclidean distance between a normalized user vector and every row of a
    normalized reference matrix, over the selected features both sides
    detect. Rows sharing no such feature are infinitely far."""

    user = np.asarray(user_values, dtype=float)
    references = np.atleast_2d(np.asarray(reference_values, dtype=float))
    shared = mask.diag & np.isfinite(user) & np.isfinite(references)
    differences = np.where(shared, references - user, 0.0)
    distances = np.sqrt(np.sum(differences * differences, axis=1))
    distances[~shared.any(axis=1)] = np.inf
    return distances


def _nearest(distances, comparisons):
    distance = float(distances.min()) if distances.size else math.inf
    if not math.isfinite(distance):
        return Match(probability=0.0, distance=math.inf, comparisons=comparisons,
                     comparable=False)
    return Match(probability=math.exp(-distance), distance=distance,
                 comparisons=comparisons, comparable=True)


def match_vectors(user_sf, reference_sf):
    """exp(-||W e_u - W e_r||) over the selected features both sides detect."""

    user, reference = np.asarray(user_sf.values), np.asarray(reference_sf.values)
    if user.size != reference.size:
        raise FeatureError("Comparing %d features with %d" % (user.size, reference.size))
    mask = reference_sf.mask
    return _nearest(masked_distances(user, reference, mask), mask.count)


def road_match(user_features, road):
    """The road-scale match of a raw user feature set: the nearest reference
    window of the road after normalizing with the road's own parameters."""

    user = road.normalization.normalize(user_features.flat)
    return _nearest(masked_distances(user, road.road_values, road.mask),
                    len(road.references) * road.mask.count)


def road_match_probability(user_sf, road):
    """Probability that the user's road-scale vector, normalized with the
    road's parameters, matches the road; 0 when they share no detected
    feature."""

    distances = masked_distances(user_sf.values, road.road_values, road.mask)
    return _nearest(distances, 0).probability


def _segment_match(user_values, road, segment):
    rows = road.segment_rows(segment)
    distances = masked_distances(user_values, road.segment_values[rows], segment.mask)
    return _nearest(distances, rows.size * segment.mask.count)


def segment_log_objective(user_features, road, segment, road_probability=1.0):
    """log(Pr(f_r) Pr(s | r) Pr(f_s)) for one segment, -inf when the segment
    is incomparable."""

    user = road.segment_normalization.normalize(user_features.flat)
    match = _segment_match(user, road, segment)
    if not match.comparable or road_probability <= 0:
        return -math.inf
    return math.log(road_probability) + math.log(segment.prior) - match.distance


def segment_posterior(user_features, road):
    """The posterior over a road's segments.

    `user_features` is the raw FeatureSet of the query; it is normalized with
    the road's segment-scale parameters and each segment keeps its nearest
    reference window. The road match probability is a common factor and
    cancels out.
    """

    user = road.segment_normalization.normalize(user_features.flat)
    log_weights, distances, comparisons = [], [], 0
    for segment in road.segments:
        match = _segment_match(user, road, segment)
        comparisons += match.comparisons
        distances.append(match.distance)
        log_weights.append(math.log(segment.prior) - match.distance
                           if match.comparable else -math.inf)

    weights = np.array(log_weights)
    if not np.isfinite(weights).any():
        logs.warn("Road %s: no comparable segment, uniform posterior" % road.road_id)
        uniform = np.full(len(road.segments), 1.0 / len(road.segments))
        return SegmentPosterior(probabilities=uniform, log_weights=tuple(log_weights),
                                distances=tuple(distances), comparisons=comparisons,
                                fallback=True)

    weights = np.exp(weights - weights.max())
    return SegmentPosterior(probabilities=weights / weights.sum(),
                            log_weights=tuple(log_weights), distances=tuple(distances),
                            comparisons=comparisons, fallback=False)


def _pair_key(match, log_weight, road, segment):
    # The joint objective, then the lowest road and segment id.
    return (log_weight - match.distance, -road.road_id, -segment.segment_id)


def _objective_bound(match, road):
    return math.log(max(segment.prior for segment in road.segments)) - match.distance


def delimit_window(buffer, seg_config):
    """The trailing segment-scale window of a buffer: the positions after the
    last singular point kept by the segmentation, or the whole buffer when that
    window is too short or the buffer cannot be segmented."""

    rss = buffer.rss
    minimum = max(seg_config.min_segment_len, MIN_SEQUENCE_LEN)
    if rss.shape[0] < 2 * minimum:
        return rss
    try:
        partition = bottom_up_partition(buffer.as_sequence(), seg_config)
    except SegmentationError:
        return rss
    start, end = partition.segment_bounds[-1]
    if end - start + 1 < minimum:
        return rss
    return rss[start:]


def current_rss(window, span):
    """The RSS at the last record of a window, per base station the value
    of a least-squares line through its last `span` detected records.

    A base station undetected at the last record stays undetected, and one
    with fewer than two detected records keeps its last value.
    """

    window = np.atleast_2d(np.asarray(window, dtype=float))
    tail = window[-span:]
    steps = np.arange(tail.shape[0], dtype=float)
    estimate = window[-1].copy()
    for k in range(tail.shape[1]):
        detected = np.isfinite(tail[:, k])
        if not math.isfinite(estimate[k]) or detected.sum() < 2:
            continue
        line = Polynomial.fit(steps[detected], tail[detected, k], 1)
        estimate[k] = float(line(steps[-1]))
    return estimate


def _coordinate(segment, rss_vector):
    try:
        return map_coordinate(segment.curves, rss_vector)
    except CurveFitError as error:
        logs.warn("%s, using the segment midpoint" % error)
        return segment.midpoint


def locate_features(user_features, current, db):
    """Road matching, segment posterior maximization and coordinate mapping
    for an extracted user feature set.

    The best matching road is searched first. Another road is only searched
    when its match probability and largest prior could still beat the best
    objective found, so the result is the maximum over all (road, segment)
    pairs.
    """

    start = monotonic_us()
    comparisons = 0
    candidates = []
    for road in db.roads:
        match = road_match(user_features, road)
        comparisons += match.comparisons
        if match.comparable:
            candidates.append((road, match))

    if not candidates:
        logs.warn("Query incomparable with every road")
        return MultiScalePosition.unlocatable(elapsed_us(start), comparisons)

    first = min(candidates, key=lambda item: (item[1].distance, item[0].road_id))
    others = sorted((item for item in candidates if item[0] is not first[0]),
                    key=lambda item: (-_objective_bound(item[1], item[0]),
                                      item[0].road_id))
    best = None
    for road, match in [first] + others:
        if best is not None and _objective_bound(match, road) < best[0][0]:
            break
        posterior = segment_posterior(user_features, road)
        comparisons += posterior.comparisons
        for index, segment in enumerate(road.segments):
            key = _pair_key(match, posterior.log_weights[index], road, segment)
            if best is None or key > best[0]:
                best = (key, road, match, posterior, index)

    _, road, match, posterior, index = best
    segment = road.segments[index]
    coord = _coordinate(segment, current)
    return MultiScalePosition(road_id=road.road_id, segment_id=segment.segment_id,
                              coord=(float(coord[0]), float(coord[1])),
                              posterior=float(posterior.probabilities[index]),
                              latency_us=elapsed_us(start),
                              road_probability=match.probability,
                              comparisons=comparisons)


def locate(buffer, db, rss_span=LocatorConfig.rss_span):
    """Locates the vehicle from its trailing RSS buffer.

    The whole buffer is matched against the reference windows. The current
    RSS comes from the records after the last singular point of the buffer.
    The reported latency covers feature extraction, window delimitation and
    matching.
    """

    start = monotonic_us()
    if len(buffer) != db.window_len:
        logs.debug("Buffer of %d records against windows of %d"
                   % (len(buffer), db.window_len))
    try:
        user_features = window_feature_set(buffer.rss, buffer.sample_interval_m)
    except FeatureError as error:
        logs.warn("Unlocatable buffer: %s" % error)
        return MultiScalePosition.unlocatable(elapsed_us(start))
    window = delimit_window(buffer, db.segmentation)
    position = locate_features(user_features, current_rss(window, rss_span), db)
    return MultiScalePosition(road_id=position.road_id, segment_id=position.segment_id,
                              coord=position.coord, posterior=position.posterior,
                              latency_us=elapsed_us(start),
                              road_probability=position.road_probability,
                              comparisons=position.comparisons)


def enumerate_positions(user_features, db):
    """Brute-force maximization of log Pr(f_r) + log Pr(s | r) + log Pr(f_s)
    over every (road, segment) pair, lowest road then segment id on ties.
    Returns (road_id, segment_id), or None when no road is comparable."""

    best_key, best_pair = None, None
    for road in db.roads:
        match = road_match(user_features, road)
        if not match.comparable:
            continue
        log_weights = segment_posterior(user_features, road).log_weights
        for segment, log_weight in zip(road.segments, log_weights):
            key = _pair_key(match, log_weight, road, segment)
            if best_key is None or key > best_key:
                best_key, best_pair = key, (road.road_id, segment.segment_id)
    return best_pair


def matching_cost(db):
    """Worst-case feature comparisons of one locate, qK(m + n): every road
    window at road scale, plus every segment window when all roads have to
    be searched."""

    road_scale = db.num_references
    segment_scale = sum(road.segment_rows(segment).size
                        for road in db.roads for segment in road.segments)
    return db.num_features * (road_scale + segment_scale)
