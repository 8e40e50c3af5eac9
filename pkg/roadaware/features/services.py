# -*- coding: utf-8 -*-

import math
from itertools import combinations

import numpy as np

from roadaware.base.exceptions import FeatureError
from roadaware.base.logs import Logs
from roadaware.crlb.services import gradient_feature_noise_std
from roadaware.crlb.services import mean_feature_noise_std
from roadaware.scenario.entities import MIN_SEQUENCE_LEN

from .entities import DIFFERENCE
from .entities import FeatureCorpus
from .entities import FeatureSet
from .entities import GRADIENT
from .entities import MEAN
from .entities import NUM_FEATURE_KINDS
from .entities import NormalizationParams
from .entities import RANGE
from .entities import SFVector
from .entities import SelectionMask
from .entities import SelectionResult
from .entities import VARIANCE

# Index of the macro base station in every RSS vector.
MACRO_INDEX = 0

# Gains closer than this are ties.
GAIN_TOLERANCE = 1e-12

logs = Logs(name="features")


def feature_values(rss, steps, macro_index=MACRO_INDEX):
    """The q x K feature matrix of a window of RSS vectors.

    `steps` holds the distances between consecutive positions.
    """

    rss = np.asarray(rss, dtype=float)
    steps = np.asarray(steps, dtype=float)
    if rss.shape[0] < MIN_SEQUENCE_LEN:
        raise FeatureError("Feature extraction needs %d positions, got %d"
                           % (MIN_SEQUENCE_LEN, rss.shape[0]))
    detected = np.isfinite(rss)
    if not detected.any():
        raise FeatureError("No base station detected in the window")

    gradients = np.diff(rss, axis=0) / steps[:, None]
    signed = np.sign(gradients) * gradients * gradients
    differences = rss - rss[:, [macro_index]]

    values = np.full((NUM_FEATURE_KINDS, rss.shape[1]), np.nan)
    for k in range(rss.shape[1]):
        column = rss[detected[:, k], k]
        gradient = signed[np.isfinite(signed[:, k]), k]
        if column.size < MIN_SEQUENCE_LEN or gradient.size == 0:
            continue
        values[GRADIENT, k] = gradient.mean()
        values[MEAN, k] = column.mean()
        values[VARIANCE, k] = column.var()
        values[RANGE, k] = column.max() - column.min()
        difference = differences[np.isfinite(differences[:, k]), k]
        if difference.size:
            values[DIFFERENCE, k] = difference.mean()
    return values


def extract_feature_set(seq, start=0, end=None, scope=None):
    """Features of positions start..end (inclusive) of a road sequence."""

    end = len(seq) - 1 if end is None else end
    window = seq.slice(start, end)
    if scope is None:
        scope = (seq.road_id,)
    try:
        values = feature_values(window.rss, window.steps())
    except FeatureError as error:
        raise error.with_context("scope %s" % (scope,))
    return FeatureSet(values=values, scope=scope)


def window_feature_set(rss, sample_interval_m, scope=()):
    """Features of an RSS window sampled every `sample_interval_m` meters."""

    rss = np.asarray(rss, dtype=float)
    steps = np.full(max(rss.shape[0] - 1, 0), float(sample_interval_m))
    return FeatureSet(values=feature_values(rss, steps), scope=scope)


def make_corpus(entries):
    """Builds a corpus from (primary FeatureSet, [extra FeatureSets]) pairs,
    one pair per class, labelled by position."""

    values, labels, primary, scopes = [], [], [], []
    for label, (main, extras) in enumerate(entries):
        scopes.append(main.scope)
        for index, feature_set in enumerate([main] + list(extras)):
            values.append(feature_set.flat)
            labels.append(label)
            primary.append(index == 0)
    if not values:
        raise FeatureError("An empty corpus")
    return FeatureCorpus(values=np.vstack(values), labels=np.array(labels),
                         primary=np.array(primary), scopes=tuple(scopes))


def sample_normalization(samples):
    """Per feature mean and std over the rows of a sample matrix, ignoring
    NaN."""

    samples = np.asarray(samples, dtype=float)
    finite = np.isfinite(samples)
    counts = finite.sum(axis=0)
    filled = np.where(finite, samples, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(counts > 0, filled.sum(axis=0) / counts, np.nan)
        centred = np.where(finite, samples - mean, 0.0)
        std = np.where(counts > 0, np.sqrt((centred ** 2).sum(axis=0) / counts), np.nan)
    return NormalizationParams(mean=mean, std=std)


def normalization_params(corpus):
    """Per feature mean and std over the primary samples, ignoring NaN."""

    return sample_normalization(corpus.primary_values)


def bin_codes(values, bins):
    """Equal-width histogram bin of every value over its column range; NaN
    gets its own bin, `bins`."""

    values = np.asarray(values, dtype=float)
    codes = np.full(values.shape, bins, dtype=np.int64)
    for column in range(values.shape[1]):
        finite = np.isfinite(values[:, column])
        if not finite.any():
            continue
        data = values[finite, column]
        low, high = data.min(), data.max()
        if high > low:
            scaled = np.floor((data - low) / (high - low) * bins).astype(np.int64)
            codes[finite, column] = np.clip(scaled, 0, bins - 1)
        else:
            codes[finite, column] = 0
    return codes


def class_entropy(corpus):
    return math.log2(len(corpus.classes))


def _conditional_entropy(labels, cells):
    classes, class_index = np.unique(labels, return_inverse=True)
    _, cell_index = np.unique(cells, return_inverse=True)
    joint = np.zeros((len(classes), cell_index.max() + 1))
    np.add.at(joint, (class_index, cell_index), 1.0)
    # Uniform class prior: p(r, cell) = p(r) * n(r, cell) / n(r).
    joint = joint / joint.sum(axis=1, keepdims=True) / len(classes)
    cell_totals = joint.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(joint > 0, joint * np.log2(joint / cell_totals), 0.0)
    return float(-terms.sum())


def _joint_cells(codes, indices, bins):
    cells = np.zeros(codes.shape[0], dtype=np.int64)
    for index in indices:
        combined = cells * (bins + 1) + codes[:, index]
        _, cells = np.unique(combined, return_inverse=True)
    return cells


def information_gain(mask, corpus, bins=8, codes=None):
    """H(r) - H(r | masked features) in bits, with a uniform class prior and
    equal-width histograms."""

    if len(corpus.classes) < 2:
        return 0.0
    indices = mask.indices if isinstance(mask, SelectionMask) else tuple(mask)
    if not indices:
        return 0.0
    if codes is None:
        codes = bin_codes(corpus.values, bins)
    entropy = class_entropy(corpus)
    cells = _joint_cells(codes, indices, bins)
    gain = entropy - _conditional_entropy(corpus.labels, cells)
    return min(max(gain, 0.0), entropy)


def saliency_prefilter(corpus, gamma):
    """Features whose normalized value changes by at least gamma between some
    pair of adjacent primary samples."""

    params = normalization_params(corpus)
    normalized = params.normalize(corpus.primary_values)
    with np.errstate(invalid="ignore"):
        jumps = np.abs(np.diff(normalized, axis=0)) >= gamma
    spread = np.isfinite(params.std) & (params.std > 0)
    return [int(f) for f in np.flatnonzero(jumps.any(axis=0) & spread)]


def exhaustive_search(corpus, candidates, bins):
    """Argmax of the information gain over all subsets of the candidates,
    preferring smaller then lexicographically smaller masks on ties."""

    codes = bin_codes(corpus.values, bins)
    entropy = class_entropy(corpus)
    best, best_gain = (), 0.0
    for size in range(1, len(candidates) + 1):
        for subset in combinations(sorted(candidates), size):
            gain = information_gain(subset, corpus, bins, codes)
            if gain > best_gain + GAIN_TOLERANCE:
                best, best_gain = subset, gain
                if best_gain >= entropy - GAIN_TOLERANCE:
                    return best, best_gain
    return best, best_gain


def greedy_search(corpus, candidates, bins):
    """Forward selection: add the feature with the largest gain until no
    feature strictly improves it."""

    codes = bin_codes(corpus.values, bins)
    selected, gain = [], 0.0
    remaining = sorted(candidates)
    while remaining:
        best_feature, best_gain = None, gain
        for feature in remaining:
            trial = information_gain(selected + [feature], corpus, bins, codes)
            if trial > best_gain + GAIN_TOLERANCE:
                best_feature, best_gain = feature, trial
        if best_feature is None:
            break
        selected.append(best_feature)
        remaining.remove(best_feature)
        gain = best_gain
    return tuple(sorted(selected)), gain


def window_noise_stds(sigmas, window_len, sample_interval_m=1.0, macro_index=MACRO_INDEX):
    """Noise std of every flattened feature of a window of `window_len`
    positions, from the per BS RSS noise std.

    Signed square gradients are taken as pure noise, averaged over the
    window's gradients; means and differences average the RSS noise. The
    variance and range have no noise model and get 0.
    """

    sigmas = np.asarray(sigmas, dtype=float)
    if window_len < MIN_SEQUENCE_LEN:
        raise FeatureError("Windows need %d positions, got %d" % (MIN_SEQUENCE_LEN, window_len))
    noise = np.zeros((NUM_FEATURE_KINDS, sigmas.size))
    for k, sigma in enumerate(sigmas):
        noise[GRADIENT, k] = (gradient_feature_noise_std(0.0, sigma, sample_interval_m)
                              / math.sqrt(window_len - 1))
        noise[MEAN, k] = mean_feature_noise_std(sigma, window_len)
        if k != macro_index:
            noise[DIFFERENCE, k] = mean_feature_noise_std(
                math.hypot(sigma, sigmas[macro_index]), window_len)
    return noise.reshape(-1)


def quiet_features(samples, noise_stds, max_ratio):
    """Features whose noise std is at most `max_ratio` times their spread
    over the rows of a sample matrix."""

    spread = sample_normalization(samples).std
    noise_stds = np.asarray(noise_stds, dtype=float)
    with np.errstate(invalid="ignore"):
        quiet = noise_stds <= max_ratio * spread
    return [int(f) for f in np.flatnonzero(quiet)]


def select_salient(corpus, config, available=None):
    """Selects the salient features of a corpus.

    `available` restricts the choice to the features a scope can provide.
    """

    size = corpus.num_features
    candidates = saliency_prefilter(corpus, config.gamma)
    if available is not None:
        allowed = set(available)
        candidates = [f for f in candidates if f in allowed]
    else:
        allowed = set(range(size))

    if len(candidates) <= config.max_exact_subset:
        subset, gain = exhaustive_search(corpus, candidates, config.bins)
        search = "exhaustive"
    else:
        subset, gain = greedy_search(corpus, candidates, config.bins)
        search = "greedy"

    if not subset:
        fallback = sorted(allowed)
        logs.warn("No salient feature among %d candidates, using the full mask of %d"
                  % (len(candidates), len(fallback)))
        mask = SelectionMask.from_indices(size, fallback)
        return SelectionResult(mask=mask, gain=information_gain(mask, corpus, config.bins),
                               candidates=tuple(candidates), search=search, fallback=True)

    logs.debug("Selected %d of %d candidates (%s), gain %.4f bits"
               % (len(subset), len(candidates), search, gain))
    return SelectionResult(mask=SelectionMask.from_indices(size, subset), gain=gain,
                           candidates=tuple(candidates), search=search)


def apply_mask(mask, features):
    """f = W e: keeps the selected features and zeroes the others."""

    if isinstance(features, FeatureSet):
        flat, scope = features.flat, features.scope
    elif isinstance(features, SFVector):
        flat, scope = features.values, features.scope
    else:
        flat, scope = np.asarray(features, dtype=float).reshape(-1), ()
    if flat.size != mask.size:
        raise FeatureError("Mask of %d entries for %d features" % (mask.size, flat.size))
    return SFVector(mask=mask, values=np.where(mask.diag, flat, 0.0), scope=scope)


def salient_vector(feature_set, mask, params):
    """Normalizes a feature set with `params` and applies the mask."""

    vector = apply_mask(mask, params.normalize(feature_set.flat))
    return SFVector(mask=mask, values=vector.values, scope=feature_set.scope)
