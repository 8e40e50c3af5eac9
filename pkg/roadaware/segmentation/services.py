# -*- coding: utf-8 -*-

from collections import namedtuple

import numpy as np

from roadaware.base.exceptions import OracleGuardError
from roadaware.base.exceptions import SegmentationError
from roadaware.base.logs import Logs
from roadaware.scenario.entities import MIN_SEQUENCE_LEN
from roadaware.scenario.services import gradient_matrix
from roadaware.scenario.services import signal_gradient

from .entities import SegmentPartition

# The longest sequence the exhaustive oracle accepts.
ORACLE_MAX_LEN = 40

# The automatic penalty in units of the noise power of the signed square
# gradients, summed over base stations.
PENALTY_SCALE = 2.0
# The automatic penalty never goes below this, so noiseless roads keep every
# singular point whose merge raises the cost.
PENALTY_FLOOR = 1e-12

# Scales a median absolute deviation to a Gaussian standard deviation.
MAD_TO_SIGMA = 1.4826

# `value` is the length-normalized cost, `spread` the sum of squared
# deviations it was normalized from.
SegmentCost = namedtuple("SegmentCost", ["value", "skipped", "spread"])

logs = Logs(name="segmentation")


def signed_sq_gradient(seq, j, k):
    """sgn(g) * g^2 for the gradient of BS k between positions j and j + 1."""

    gradient = signal_gradient(seq, j, k)
    return float(np.sign(gradient) * gradient * gradient)


def signed_sq_gradients(seq):
    """All signed square gradients, shape (L - 1, K), NaN where undetected."""

    gradients = gradient_matrix(seq)
    return np.sign(gradients) * gradients * gradients


def _gradient_range(length, start, end):
    # A segment owns the gradients leaving its positions; the last segment of
    # the road has no gradient after its final position.
    return start, min(end, length - 2)


def _cost(values, length, start, end):
    lo, hi = _gradient_range(length, start, end)
    total = 0.0
    spread = 0.0
    skipped = []
    for k in range(values.shape[1]):
        column = values[lo:hi + 1, k]
        detected = column[np.isfinite(column)]
        if detected.size < column.size:
            skipped.append(k)
        if detected.size == 0:
            continue
        squares = float(np.sum((detected - detected.mean()) ** 2))
        spread += squares
        total += squares / detected.size
    return SegmentCost(total, tuple(skipped), spread)


def segment_cost(seq, start, end):
    """Sum over base stations of the variance of the signed square gradients
    of positions start..end. Base stations not detected over part of the range
    only contribute where they are detected and are listed in `skipped`."""

    if not 0 <= start < end < len(seq):
        raise SegmentationError("Invalid segment [%s, %s] for %d positions"
                                % (start, end, len(seq)))
    return _cost(signed_sq_gradients(seq), len(seq), start, end)


def singular_point_mask(seq, tau):
    """Boolean array over j = 0..L-3, true where position j is a singular
    point."""

    gradients = gradient_matrix(seq)
    current, following = gradients[:-1], gradients[1:]
    with np.errstate(invalid="ignore"):
        flips = current * following < 0
        jumps = np.abs(following - current) >= tau
    return np.any(flips | jumps, axis=1)


def is_singular_point(seq, j, tau):
    """True iff some BS gradient changes sign or changes by at least tau
    between (j, j + 1) and (j + 1, j + 2)."""

    if not 0 <= j < len(seq) - 2:
        return False
    return bool(singular_point_mask(seq.slice(j, j + 2), tau)[0])


def _check_sequence(seq):
    if len(seq) < MIN_SEQUENCE_LEN:
        raise SegmentationError("Road %s: sequence too short to segment (%d positions)"
                                % (seq.road_id, len(seq)))
    if not np.any(np.all(np.isfinite(seq.rss), axis=0)):
        raise SegmentationError("Road %s: no base station detected throughout"
                                % seq.road_id)


def finest_partition(seq, config):
    """Boundaries at singular points, scanned left to right, keeping every
    segment at least min_segment_len positions long."""

    length = len(seq)
    candidates = np.flatnonzero(singular_point_mask(seq, config.tau))
    boundaries = []
    start = 0
    for j in candidates:
        if j - start + 1 >= config.min_segment_len and length - 1 - j >= config.min_segment_len:
            boundaries.append(int(j))
            start = int(j) + 1
    return boundaries


def rss_noise_sigmas(seq):
    """Robust per BS estimate of the RSS noise std.

    Second differences cancel the smooth path-loss trend and leave white noise
    with variance 6 sigma^2; the median absolute deviation ignores the few
    large values at genuine slope changes.
    """

    sigmas = []
    for column in seq.rss.T:
        second = np.diff(column, n=2)
        second = second[np.isfinite(second)]
        if second.size == 0:
            sigmas.append(0.0)
            continue
        mad = float(np.median(np.abs(second - np.median(second))))
        sigmas.append(MAD_TO_SIGMA * mad / np.sqrt(6.0))
    return np.array(sigmas)


def auto_penalty(seq):
    """The merge penalty calibrated on the noise of the sequence.

    A gradient over one step carries noise of variance 2 sigma^2 / dD^2, and
    the signed square of pure gradient noise has a power of the order of that
    variance squared. Returns PENALTY_SCALE times that power summed over base
    stations, never less than PENALTY_FLOOR.
    """

    interval = float(np.median(seq.steps()))
    gradient_variances = 2.0 * rss_noise_sigmas(seq) ** 2 / interval ** 2
    return max(PENALTY_SCALE * float(np.sum(gradient_variances ** 2)), PENALTY_FLOOR)


def bottom_up_partition(seq, config, n_segments=None):
    """Bottom-up change point search over the finest valid partition.

    Adjacent segments are merged cheapest first. Without `n_segments` a merge
    is priced by the rise of the length-weighted cost (the summed squared
    deviations) and merging stops once the cheapest rise exceeds the penalty.
    With `n_segments` a merge is priced by the rise of the normalized cost and
    merging stops when that many segments remain.
    """

    _check_sequence(seq)
    values = signed_sq_gradients(seq)
    length = len(seq)
    field = "value" if n_segments is not None else "spread"

    def score(start, end):
        return getattr(_cost(values, length, start, end), field)

    boundaries = finest_partition(seq, config)
    bounds = list(zip([0] + [b + 1 for b in boundaries], boundaries + [length - 1]))
    costs = [score(start, end) for start, end in bounds]

    def merge_increase(index):
        start, end = bounds[index][0], bounds[index + 1][1]
        return score(start, end) - costs[index] - costs[index + 1]

    increases = [merge_increase(index) for index in range(len(bounds) - 1)]

    penalty = config.penalty
    if penalty is None:
        penalty = auto_penalty(seq)

    while len(bounds) > 1:
        index = int(np.argmin(increases))
        if n_segments is None:
            if increases[index] > penalty:
                break
        elif len(bounds) <= n_segments:
            break

        merged = (bounds[index][0], bounds[index + 1][1])
        bounds[index:index + 2] = [merged]
        costs[index:index + 2] = [score(*merged)]
        del increases[index]
        if index > 0:
            increases[index - 1] = merge_increase(index - 1)
        if index < len(bounds) - 1:
            increases[index] = merge_increase(index)

    partition = SegmentPartition(road_id=seq.road_id, length=length,
                                 sp_indices=[end for _, end in bounds[:-1]],
                                 penalty=penalty)
    logs.debug("Road %s: %d singular points kept of %d, penalty %.6g"
               % (seq.road_id, len(partition.sp_indices), len(boundaries), penalty))
    return partition


def partition_cost(seq, partition):
    values = signed_sq_gradients(seq)
    return sum(_cost(values, len(seq), start, end).value
               for start, end in partition.segment_bounds)


def exhaustive_partition_oracle(seq, n_segments, min_segment_len=2):
    """The globally cost-minimal partition into exactly n_segments segments,
    by dynamic programming over the last boundary."""

    length = len(seq)
    if length > ORACLE_MAX_LEN:
        raise OracleGuardError("Exhaustive search needs at most %d positions, got %d"
                               % (ORACLE_MAX_LEN, length))
    if n_segments < 1 or n_segments * min_segment_len > length:
        raise SegmentationError("Cannot split %d positions into %s segments"
                                % (length, n_segments))

    values = signed_sq_gradients(seq)
    cost = {}

    def segment(start, end):
        if (start, end) not in cost:
            cost[(start, end)] = _cost(values, length, start, end).value
        return cost[(start, end)]

    # best[c][e]: cheapest split of positions 0..e into c + 1 segments.
    best = [[np.inf] * length for _ in range(n_segments)]
    previous = [[None] * length for _ in range(n_segments)]
    for end in range(min_segment_len - 1, length):
        best[0][end] = segment(0, end)
    for count in range(1, n_segments):
        for end in range(length):
            for boundary in range(end - min_segment_len, -1, -1):
                head = best[count - 1][boundary]
                if head == np.inf:
                    continue
                total = head + segment(boundary + 1, end)
                if total < best[count][end] or (total == best[count][end]
                                                and boundary < previous[count][end]):
                    best[count][end] = total
                    previous[count][end] = boundary

    boundaries = []
    end = length - 1
    for count in range(n_segments - 1, 0, -1):
        end = previous[count][end]
        boundaries.append(end)
    return SegmentPartition(road_id=seq.road_id, length=length,
                            sp_indices=sorted(boundaries))


def partition_to_dict(seq, partition):
    values = signed_sq_gradients(seq)
    return {
        "road_id": partition.road_id,
        "sp_indices": list(partition.sp_indices),
        "segments": [{
            "start": start,
            "end": end,
            "cost": _cost(values, len(seq), start, end).value,
        } for start, end in partition.segment_bounds],
    }


GapRow = namedtuple("GapRow", ["road_id", "length", "num_segments", "greedy_cost",
                               "oracle_cost", "ratio"])


def oracle_gap(seq, config):
    """Cost of the bottom-up partition against the exhaustive optimum with
    the same number of segments and the same minimum segment length."""

    greedy = bottom_up_partition(seq, config)
    oracle = exhaustive_partition_oracle(seq, greedy.num_segments, config.min_segment_len)
    greedy_cost = partition_cost(seq, greedy)
    oracle_cost = partition_cost(seq, oracle)
    if oracle_cost > 0:
        ratio = greedy_cost / oracle_cost
    else:
        ratio = 1.0 if greedy_cost <= 0 else np.inf
    return GapRow(road_id=seq.road_id, length=len(seq), num_segments=greedy.num_segments,
                  greedy_cost=greedy_cost, oracle_cost=oracle_cost, ratio=float(ratio))


def gap_summary(rows, tolerance=1.05):
    """How often and how far the bottom-up cost exceeds the optimum."""

    ratios = np.array([row.ratio for row in rows], dtype=float)
    if ratios.size == 0:
        raise SegmentationError("No gap to summarize")
    within = ratios <= tolerance
    summary = {
        "sequences": int(ratios.size),
        "tolerance": float(tolerance),
        "within": int(within.sum()),
        "worst_ratio": float(ratios.max()),
        "mean_ratio": float(ratios[np.isfinite(ratios)].mean()),
    }
    logs.info("Bottom-up within %.2fx of the optimum on %d of %d sequences, worst %.4f"
              % (tolerance, summary["within"], summary["sequences"],
                 summary["worst_ratio"]))
    return summary
