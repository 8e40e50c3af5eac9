# -*- coding: utf-8 -*-

from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np

from roadaware.base.exceptions import CRLBError
from roadaware.base.exceptions import DomainError

# Features a bound can be computed for.
FEATURE_GRADIENT = "gradient"
FEATURE_MEAN = "mean"
BOUND_FEATURES = (FEATURE_GRADIENT, FEATURE_MEAN)


def _vector(values, size, name):
    array = np.array(values, dtype=float, copy=True).reshape(-1)
    if array.size == 1 and size > 1:
        array = np.full(size, float(array[0]))
    if array.size != size:
        raise CRLBError("%s needs %d values, got %d" % (name, size, array.size))
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SegmentGeometry:
    """Sampling positions of one segment and the base stations observing it.

    `points` is (N, 2), `bs_positions` is (K, 2); `rho` and `eta` are the noise
    standard deviations of the gradient and mean features. `first` and
    `midpoint` anchor the linear parameterization of the positions.
    """
    points: np.ndarray
    bs_positions: np.ndarray
    beta: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    p0: Optional[np.ndarray] = None
    first: Optional[Tuple[float, float]] = None
    midpoint: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        points = np.array(self.points, dtype=float, copy=True).reshape(-1, 2)
        bs_positions = np.array(self.bs_positions, dtype=float, copy=True).reshape(-1, 2)
        if points.shape[0] < 3:
            raise CRLBError("A segment geometry needs at least 3 positions")
        if bs_positions.shape[0] < 1:
            raise CRLBError("A segment geometry needs at least one base station")
        num_bs = bs_positions.shape[0]
        points.setflags(write=False)
        bs_positions.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "bs_positions", bs_positions)
        for name in ("beta", "rho", "eta"):
            object.__setattr__(self, name, _vector(getattr(self, name), num_bs, name))
        object.__setattr__(self, "p0", _vector(0.0 if self.p0 is None else self.p0,
                                               num_bs, "p0"))
        if not np.all(np.isfinite(self.rho) & (self.rho > 0)):
            raise CRLBError("rho must be positive")
        if not np.all(np.isfinite(self.eta) & (self.eta > 0)):
            raise CRLBError("eta must be positive")
        if np.any(self.distances <= 0):
            raise DomainError("A sampling position coincides with a base station")
        if self.first is None:
            object.__setattr__(self, "first", tuple(float(v) for v in points[0]))
        if self.midpoint is None:
            middle = points[points.shape[0] // 2 - 1]
            object.__setattr__(self, "midpoint", tuple(float(v) for v in middle))

    @classmethod
    def from_endpoints(cls, first, midpoint, num_positions, bs_positions, beta, rho, eta,
                       p0=None):
        """Positions x_i = (2i/N)(x_m - x_1) + x_1 for i = 1..N."""

        first = np.asarray(first, dtype=float)
        midpoint = np.asarray(midpoint, dtype=float)
        steps = 2.0 * np.arange(1, num_positions + 1) / num_positions
        points = first + steps[:, None] * (midpoint - first)
        return cls(points=points, bs_positions=bs_positions, beta=beta, rho=rho, eta=eta,
                   p0=p0, first=tuple(float(v) for v in first),
                   midpoint=tuple(float(v) for v in midpoint))

    @classmethod
    def from_positions(cls, points, bs_positions, beta, rho, eta, p0=None):
        return cls(points=points, bs_positions=bs_positions, beta=beta, rho=rho, eta=eta,
                   p0=p0)

    def moved(self, midpoint):
        """The geometry re-parameterized around another midpoint."""

        return SegmentGeometry.from_endpoints(self.first, midpoint, self.num_positions,
                                              self.bs_positions, self.beta, self.rho,
                                              self.eta, self.p0)

    def without_base_station(self, bs_index):
        keep = [k for k in range(self.num_base_stations) if k != bs_index]
        return SegmentGeometry(points=self.points, bs_positions=self.bs_positions[keep],
                               beta=self.beta[keep], rho=self.rho[keep],
                               eta=self.eta[keep], p0=self.p0[keep], first=self.first,
                               midpoint=self.midpoint)

    @property
    def num_positions(self):
        return self.points.shape[0]

    @property
    def num_base_stations(self):
        return self.bs_positions.shape[0]

    @property
    def offsets(self):
        """(N, K, 2) vectors from each base station to each position."""

        return self.points[:, None, :] - self.bs_positions[None, :, :]

    @property
    def distances(self):
        return np.hypot(self.offsets[..., 0], self.offsets[..., 1])

    @property
    def azimuths(self):
        return np.arctan2(self.offsets[..., 1], self.offsets[..., 0])


@dataclass(frozen=True, eq=False)
class CRLBReport:
    fim: np.ndarray
    trace_bound: float
    closed_form_bound: Optional[float]
    features: Tuple[str, ...]
    # False when the FIM trace is zero and the bound is infinite.
    bounded: bool = True
