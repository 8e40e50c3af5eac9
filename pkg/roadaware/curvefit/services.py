# -*- coding: utf-8 -*-

import math

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial

from roadaware.base.exceptions import CurveFitError
from roadaware.base.exceptions import RankDeficientFit
from roadaware.base.logs import Logs

from .entities import FittedCurve

# Residuals below this, in meters, weigh the same in the coordinate mean.
RESIDUAL_FLOOR_M = 1e-3

logs = Logs(name="curvefit")


def _power_coefficients(rss, target, order):
    # Fit in numpy's scaled domain, then convert back to powers of the RSS.
    coefficients = Polynomial.fit(rss, target, order).convert().coef
    padded = np.zeros(order + 1)
    padded[:coefficients.size] = coefficients[:order + 1]
    return padded


def evaluate(curve, rss):
    """(G(P), H(P)) of one curve."""

    return (float(polynomial.polyval(rss, curve.theta)),
            float(polynomial.polyval(rss, curve.alpha)))


def curve_residual(theta, alpha, rss, coords):
    """RMS Euclidean distance between curve estimates and coordinates."""

    dx = polynomial.polyval(rss, theta) - coords[:, 0]
    dy = polynomial.polyval(rss, alpha) - coords[:, 1]
    return float(math.sqrt(np.mean(dx * dx + dy * dy)))


def segment_bounds(coords, margin):
    low, high = coords.min(axis=0), coords.max(axis=0)
    pad = (high - low) * margin
    return (float(low[0] - pad[0]), float(low[1] - pad[1]),
            float(high[0] + pad[0]), float(high[1] + pad[1]))


def fit_curve(rss, coords, order, bs_index, scope=(), bounds=None):
    """Least-squares polynomial curves mapping one base station's RSS to the
    coordinates. The order drops to what the distinct RSS values support."""

    rss = np.asarray(rss, dtype=float)
    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(rss)):
        raise CurveFitError("Base station %d is not detected throughout the segment"
                            % (bs_index + 1))
    effective = min(order, np.unique(rss).size - 1)
    if effective < 1:
        raise RankDeficientFit(bs_index)

    theta = _power_coefficients(rss, coords[:, 0], effective)
    alpha = _power_coefficients(rss, coords[:, 1], effective)
    return FittedCurve(scope=tuple(scope) + (bs_index,), bs_index=bs_index,
                       order=effective, theta=theta, alpha=alpha,
                       fit_residual=curve_residual(theta, alpha, rss, coords),
                       bounds=bounds)


def fit_segment_curves(segment, order, scope=(), margin=0.1, skip_degenerate=False):
    """One fitted curve per base station detected throughout the segment.

    With `skip_degenerate`, base stations whose RSS is constant are left out
    instead of failing the fit.
    """

    bounds = segment_bounds(segment.coords, margin)
    curves = []
    for k in range(segment.num_base_stations):
        column = segment.rss[:, k]
        if not np.all(np.isfinite(column)):
            continue
        try:
            curves.append(fit_curve(column, segment.coords, order, k, scope, bounds))
        except RankDeficientFit as error:
            if not skip_degenerate:
                raise error.with_context("segment %s" % (scope,))
            logs.warn("Segment %s: %s, curve skipped" % (scope, error))
    if not curves:
        raise CurveFitError("Segment %s: no base station supports a curve" % (scope,))
    return curves


def map_coordinate(curves, rss_vector):
    """Mean of the curve estimates over the base stations detected in
    `rss_vector`, each weighted by its inverse squared fit residual, clamped
    to the segment box. Curves fitting equally well get equal weights."""

    rss_vector = np.asarray(rss_vector, dtype=float)
    usable = [curve for curve in curves
              if curve.bs_index < rss_vector.size
              and math.isfinite(rss_vector[curve.bs_index])]
    if not usable:
        raise CurveFitError("No curve matches a detected base station")

    estimates = [evaluate(curve, rss_vector[curve.bs_index]) for curve in usable]
    weights = [1.0 / max(curve.fit_residual, RESIDUAL_FLOOR_M) ** 2 for curve in usable]
    total = math.fsum(weights)
    x = math.fsum(w * e[0] for w, e in zip(weights, estimates)) / total
    y = math.fsum(w * e[1] for w, e in zip(weights, estimates)) / total
    bounds = curves[0].bounds
    if bounds is not None:
        x = min(max(x, bounds[0]), bounds[2])
        y = min(max(y, bounds[1]), bounds[3])
    return (x, y)
