# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np

from roadaware.base.config import get_setting
from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import CurveFitError


@dataclass(frozen=True)
class CurveFitConfig:
    order: int = 3
    # Relative expansion of the segment bounding box used to clamp estimates.
    bbox_margin: float = 0.1

    def __post_init__(self):
        if self.order < 1:
            raise ConfigurationError("curve order must be at least 1")
        if self.bbox_margin < 0:
            raise ConfigurationError("bbox_margin must be nonnegative")

    @classmethod
    def from_settings(cls, overrides=None):
        return cls(order=get_setting("CURVEFIT_ORDER", int, overrides),
                   bbox_margin=get_setting("CURVEFIT_BBOX_MARGIN", float, overrides))


@dataclass(frozen=True, eq=False)
class FittedCurve:
    """x = G(P) and y = H(P) for one base station in one segment.

    `theta` and `alpha` are power-basis coefficients in RSS, lowest degree
    first. `bounds` is the clamping box (xmin, ymin, xmax, ymax).
    """
    scope: Tuple
    bs_index: int
    order: int
    theta: np.ndarray
    alpha: np.ndarray
    fit_residual: float
    bounds: Optional[Tuple[float, float, float, float]] = None

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float, copy=True)
        alpha = np.array(self.alpha, dtype=float, copy=True)
        if self.order < 1:
            raise CurveFitError("curve order must be at least 1")
        if theta.size != self.order + 1 or alpha.size != self.order + 1:
            raise CurveFitError("a curve of order %d has %d coefficients"
                                % (self.order, self.order + 1))
        theta.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "scope", tuple(self.scope))
        if self.bounds is not None:
            object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
