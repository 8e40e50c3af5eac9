# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np

from roadaware.base.config import get_setting
from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import DataError


@dataclass(frozen=True)
class BaselineConfig:
    grid_size_m: float = 2.0
    rwknn_k: int = 3
    # Half-width, in cells, of the cluster kept around the nearest RP.
    rwknn_radius_cells: int = 2
    cfels_step_m: float = 0.1

    def __post_init__(self):
        if not self.grid_size_m > 0:
            raise ConfigurationError("grid size must be positive")
        if self.rwknn_k < 1:
            raise ConfigurationError("k must be at least 1")
        if self.rwknn_radius_cells < 0:
            raise ConfigurationError("the RWKNN radius must be nonnegative")
        if not self.cfels_step_m > 0:
            raise ConfigurationError("the CF-ELS step must be positive")

    @classmethod
    def from_settings(cls, overrides=None):
        return cls(grid_size_m=get_setting("BASELINES_GRID_SIZE_M", float, overrides),
                   rwknn_k=get_setting("BASELINES_RWKNN_K", int, overrides),
                   rwknn_radius_cells=get_setting("BASELINES_RWKNN_RADIUS_CELLS", int,
                                                  overrides),
                   cfels_step_m=get_setting("BASELINES_CFELS_STEP_M", float, overrides))


@dataclass(frozen=True, eq=False)
class ReferencePoint:
    cell: Tuple[int, int]
    coord: Tuple[float, float]
    rss: np.ndarray
    # Mean spatial RSS gradient per base station, dB/m.
    gradient: np.ndarray


@dataclass(frozen=True, eq=False)
class FingerprintGrid:
    grid_size_m: float
    reference_points: Tuple[ReferencePoint, ...]

    def __post_init__(self):
        if not self.grid_size_m > 0:
            raise ConfigurationError("grid size must be positive")
        if not self.reference_points:
            raise DataError("A fingerprint grid needs at least one reference point")
        for rp in self.reference_points:
            if not np.any(np.isfinite(rp.rss)):
                raise DataError("Reference point %s detects no base station" % (rp.cell,))
        rps = tuple(self.reference_points)
        object.__setattr__(self, "reference_points", rps)
        object.__setattr__(self, "_rss", np.vstack([rp.rss for rp in rps]))
        object.__setattr__(self, "_gradients", np.vstack([rp.gradient for rp in rps]))
        object.__setattr__(self, "_coords", np.array([rp.coord for rp in rps]))
        object.__setattr__(self, "_cells", np.array([rp.cell for rp in rps]))

    def __len__(self):
        return len(self.reference_points)

    @property
    def rss(self):
        return self._rss

    @property
    def gradients(self):
        return self._gradients

    @property
    def coords(self):
        return self._coords

    @property
    def cells(self):
        return self._cells


@dataclass(frozen=True, eq=False)
class CFELSModel:
    """Log-distance path-loss curves P = intercept - slope * log10(d) per BS,
    and the region scanned by the search."""
    bs_positions: np.ndarray
    intercept: np.ndarray
    slope: np.ndarray
    region: Tuple[float, float, float, float]


@dataclass(frozen=True)
class BaselineFix:
    coord: Optional[Tuple[float, float]]
    ambiguous: bool = False
    residual: Optional[float] = None
