# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from roadaware.base.config import get_setting
from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import FeatureError

# Feature kinds, one row each: signed mean square gradient, mean RSS, RSS
# variance, mean difference to the macro BS and RSS range.
FEATURE_KINDS = ("gradient", "mean", "variance", "difference", "range")
NUM_FEATURE_KINDS = len(FEATURE_KINDS)
GRADIENT, MEAN, VARIANCE, DIFFERENCE, RANGE = range(NUM_FEATURE_KINDS)


def feature_index(kind, bs_index, num_base_stations):
    """Position of (kind, bs) in a flattened feature set."""

    return kind * num_base_stations + bs_index


def feature_name(index, num_base_stations):
    kind, bs_index = divmod(index, num_base_stations)
    return "%s_%d" % (FEATURE_KINDS[kind], bs_index + 1)


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """The q x K feature matrix of one scope. NaN marks a feature that is not
    available because its base station was not detected."""
    values: np.ndarray
    scope: Tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2 or values.shape[0] != NUM_FEATURE_KINDS:
            raise FeatureError("A feature set has %d rows" % NUM_FEATURE_KINDS)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "scope", tuple(self.scope))

    @property
    def num_base_stations(self):
        return self.values.shape[1]

    @property
    def size(self):
        return self.values.size

    @property
    def flat(self):
        return self.values.reshape(-1)

    def available(self):
        """Indices of the flattened features that are available."""

        return tuple(int(i) for i in np.flatnonzero(np.isfinite(self.flat)))


@dataclass(frozen=True, eq=False)
class SelectionMask:
    """The binary diagonal of a feature selection matrix."""
    diag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, copy=True)
        if diag.ndim != 1 or not np.all((diag == 0) | (diag == 1)):
            raise FeatureError("A selection mask is a binary vector")
        diag = diag.astype(bool)
        diag.setflags(write=False)
        object.__setattr__(self, "diag", diag)

    def __eq__(self, other):
        if not isinstance(other, SelectionMask):
            return NotImplemented
        return np.array_equal(self.diag, other.diag)

    __hash__ = None

    @classmethod
    def from_indices(cls, size, indices):
        diag = np.zeros(size, dtype=bool)
        diag[list(indices)] = True
        return cls(diag)

    @classmethod
    def from_bits(cls, bits):
        if set(bits) - {"0", "1"}:
            raise FeatureError("Malformed mask bit string: %r" % bits)
        return cls(np.array([bit == "1" for bit in bits], dtype=bool))

    @property
    def size(self):
        return self.diag.size

    @property
    def count(self):
        return int(self.diag.sum())

    @property
    def indices(self):
        return tuple(int(i) for i in np.flatnonzero(self.diag))

    @property
    def bits(self):
        return "".join("1" if bit else "0" for bit in self.diag)


@dataclass(frozen=True, eq=False)
class SFVector:
    """Masked feature values; unselected positions hold exactly zero."""
    mask: SelectionMask
    values: np.ndarray
    scope: Tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "scope", tuple(self.scope))


@dataclass(frozen=True, eq=False)
class NormalizationParams:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        for name in ("mean", "std"):
            array = np.array(getattr(self, name), dtype=float, copy=True)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def normalize(self, flat):
        """(value - mean) / std; features with no spread are only centred."""

        scale = np.where(np.isfinite(self.std) & (self.std > 0), self.std, 1.0)
        return (np.asarray(flat, dtype=float) - self.mean) / scale


@dataclass(frozen=True)
class SFConfig:
    # Normalized-feature threshold of the saliency prefilter.
    gamma: float = 0.1
    bins: int = 8
    max_exact_subset: int = 16
    # Largest noise std to spread ratio of a selectable window feature.
    max_noise_ratio: float = 0.5

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigurationError("gamma must be positive")
        if self.bins < 2:
            raise ConfigurationError("bins must be at least 2")
        if self.max_exact_subset < 0:
            raise ConfigurationError("max_exact_subset must be nonnegative")
        if not self.max_noise_ratio > 0:
            raise ConfigurationError("max_noise_ratio must be positive")

    @classmethod
    def from_settings(cls, overrides=None):
        return cls(gamma=get_setting("FEATURES_GAMMA", float, overrides),
                   bins=get_setting("FEATURES_BINS", int, overrides),
                   max_exact_subset=get_setting("FEATURES_MAX_EXACT_SUBSET", int,
                                                overrides),
                   max_noise_ratio=get_setting("FEATURES_MAX_NOISE_RATIO", float,
                                               overrides))


@dataclass(frozen=True, eq=False)
class FeatureCorpus:
    """Labelled flattened feature samples at one scale.

    Each class (a road, or a segment of one road) has exactly one primary
    sample, its own feature set; extra samples come from the reference windows
    of the class and only feed the class-conditional histograms.
    """
    values: np.ndarray
    labels: np.ndarray
    primary: np.ndarray
    scopes: Tuple = ()

    @property
    def num_features(self):
        return self.values.shape[1]

    @property
    def classes(self):
        return np.unique(self.labels)

    @property
    def primary_values(self):
        return self.values[self.primary]


@dataclass(frozen=True)
class SelectionResult:
    mask: SelectionMask
    gain: float
    candidates: Tuple[int, ...]
    search: str
    # True when nothing survived the prefilter and the full mask was used.
    fallback: bool = False
