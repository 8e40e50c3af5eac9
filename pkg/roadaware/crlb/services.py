# -*- coding: utf-8 -*-

import math
from collections import namedtuple

import numpy as np

from roadaware.base.exceptions import CRLBError
from roadaware.base.exceptions import DataError
from roadaware.base.exceptions import DomainError
from roadaware.base.logs import Logs

from .entities import BOUND_FEATURES
from .entities import CRLBReport
from .entities import FEATURE_GRADIENT
from .entities import FEATURE_MEAN
from .entities import SegmentGeometry

LN10 = math.log(10.0)

# Cross products below this (relative) make a geometry colinear.
COLINEAR_TOLERANCE = 1e-9

# Absolute slack of the FIM comparisons.
PROPOSITION_TOLERANCE = 1e-9

Prop2Check = namedtuple("Prop2Check", ["holds", "a", "b", "decrease", "expected"])
Prop3Check = namedtuple("Prop3Check", ["holds", "difference"])

logs = Logs(name="crlb")


def gradient_feature_model(geom):
    """Noise-free mean square gradient of every base station over the
    segment, with a unit sampling interval."""

    log_d = np.log10(geom.distances)
    steps = np.diff(log_d, axis=0)
    n = geom.num_positions
    return (10.0 * geom.beta) ** 2 / (n - 1) * np.sum(steps * steps, axis=0)


def mean_feature_model(geom):
    """Noise-free mean RSS of every base station over the segment."""

    n = geom.num_positions
    return -10.0 * geom.beta / n * np.sum(np.log10(geom.distances), axis=0) + geom.p0


def _position_weights(n):
    # d x_i / d x_m = 2i / N for i = 1..N.
    return 2.0 * np.arange(1, n + 1) / n


def jacobian_gradient_feature(geom):
    """K x 2 derivatives of the gradient feature with respect to the
    segment midpoint."""

    d = geom.distances
    if np.any(d <= 0):
        raise DomainError("Zero distance in the segment geometry")
    n = geom.num_positions
    steps = np.diff(np.log10(d), axis=0)
    weights = _position_weights(n)[:, None] / d
    scale = (10.0 * geom.beta) ** 2 / ((n - 1) * LN10)

    rows = []
    for trig in (np.cos(geom.azimuths), np.sin(geom.azimuths)):
        slope = trig * weights
        rows.append(scale * np.sum(2.0 * steps * (slope[1:] - slope[:-1]), axis=0))
    return np.column_stack(rows)


def jacobian_mean_feature(geom):
    """K x 2 derivatives of the mean RSS feature with respect to the segment
    midpoint."""

    d = geom.distances
    if np.any(d <= 0):
        raise DomainError("Zero distance in the segment geometry")
    n = geom.num_positions
    index = np.arange(1, n + 1)[:, None]
    scale = -20.0 * geom.beta / (n * n * LN10)
    return np.column_stack([scale * np.sum(index * np.cos(geom.azimuths) / d, axis=0),
                            scale * np.sum(index * np.sin(geom.azimuths) / d, axis=0)])


def fim(jacobians, variances):
    """Sum over features of J^T diag(1/variance) J.

    Takes one (J, variances) pair or matching sequences of them.
    """

    if isinstance(jacobians, np.ndarray) and jacobians.ndim == 2:
        jacobians, variances = [jacobians], [variances]
    if len(jacobians) != len(variances):
        raise CRLBError("%d Jacobians for %d noise covariances"
                        % (len(jacobians), len(variances)))

    total = np.zeros((2, 2))
    for jacobian, variance in zip(jacobians, variances):
        jacobian = np.asarray(jacobian, dtype=float).reshape(-1, 2)
        variance = np.asarray(variance, dtype=float).reshape(-1)
        if variance.size != jacobian.shape[0]:
            raise CRLBError("Noise covariance of size %d for %d features"
                            % (variance.size, jacobian.shape[0]))
        if not np.all(np.isfinite(variance) & (variance > 0)):
            raise CRLBError("Singular noise covariance")
        total += jacobian.T @ (jacobian / variance[:, None])
    # Exact symmetry.
    return (total + total.T) / 2.0


def crlb_trace_bound(phi):
    """4 / (phi_11 + phi_22), a lower bound of tr(phi^-1). Infinite when the
    trace is zero."""

    trace = float(phi[0, 0] + phi[1, 1])
    if trace <= 0:
        logs.warn("FIM trace is zero, the bound is infinite")
        return math.inf
    return 4.0 / trace


def _endpoint_terms(geom, first, last):
    n = geom.num_positions
    weights = geom.beta ** 4 / geom.rho ** 2
    return weights * (1.0 / last - 1.0 / (first * n)) ** 2


def closed_form_colinear_bound(geom):
    """The minimal trace bound of a colinear geometry with unit log-distance
    steps, from its endpoint distances."""

    d = geom.distances
    total = math.fsum(_endpoint_terms(geom, d[0], d[-1]))
    if not total > 0:
        raise CRLBError("Degenerate endpoint distances")
    n = geom.num_positions
    return LN10 ** 2 / (4e4 / (n - 1) ** 2 * total)


def endpoint_ratio(geom, first_distances, last_distances):
    """Bound of a segment with the given endpoint distances over the bound of
    the same segment ending at the distance extremes; at least 1."""

    d = geom.distances
    d_min, d_max = d.min(axis=0), d.max(axis=0)
    first = np.asarray(first_distances, dtype=float).reshape(-1)
    last = np.asarray(last_distances, dtype=float).reshape(-1)
    for values in (first, last):
        if values.size != geom.num_base_stations:
            raise CRLBError("One endpoint distance per base station is needed")
        if np.any(values < d_min) or np.any(values > d_max):
            raise CRLBError("Endpoint distances must lie within the segment's range")
    extreme = math.fsum(_endpoint_terms(geom, d_max, d_min))
    current = math.fsum(_endpoint_terms(geom, first, last))
    if not current > 0:
        raise CRLBError("Degenerate endpoint distances")
    return extreme / current


def gradient_fim(geom):
    return fim(jacobian_gradient_feature(geom), geom.rho ** 2)


def mean_fim(geom):
    return fim(jacobian_mean_feature(geom), geom.eta ** 2)


def verify_prop2(geom):
    """Adding the mean feature lowers the trace bound by 4b / (a (a + b)),
    where a and b are the traces of the gradient and mean FIMs."""

    a = float(np.trace(gradient_fim(geom)))
    b = float(np.trace(mean_fim(geom)))
    if not a > 0:
        raise CRLBError("The gradient feature carries no information")
    joint = fim([jacobian_gradient_feature(geom), jacobian_mean_feature(geom)],
                [geom.rho ** 2, geom.eta ** 2])
    decrease = 4.0 / a - crlb_trace_bound(joint)
    expected = 4.0 * b / (a * (a + b))
    close = abs(decrease - expected) <= PROPOSITION_TOLERANCE * max(1.0, abs(expected))
    holds = close and (decrease > 0 if b > 0 else abs(decrease) <= PROPOSITION_TOLERANCE)
    return Prop2Check(holds=holds, a=a, b=b, decrease=decrease, expected=expected)


def verify_prop3(geom, bs_index=-1):
    """Dropping a base station whose distance barely changes over the segment
    leaves the gradient FIM unchanged."""

    bs_index = bs_index % geom.num_base_stations
    if geom.num_base_stations < 2:
        raise CRLBError("Need another base station to drop one")
    full = gradient_fim(geom)
    reduced = gradient_fim(geom.without_base_station(bs_index))
    difference = float(np.max(np.abs(full - reduced)))
    holds = difference <= PROPOSITION_TOLERANCE * max(1.0, float(np.max(np.abs(full))))
    return Prop3Check(holds=holds, difference=difference)


def gradient_feature_noise_std(mean_gradient, sigma, sample_interval_m=1.0):
    """Noise std of a signed square gradient from the RSS noise std.

    A gradient's noise std is s = sigma * sqrt(2) / interval; the square
    contributes 2 |g| s to first order plus the Gaussian second-order term.
    """

    s = sigma * math.sqrt(2.0) / sample_interval_m
    return math.sqrt((2.0 * abs(mean_gradient) * s) ** 2 + 2.0 * s ** 4)


def mean_feature_noise_std(sigma, num_positions):
    return sigma / math.sqrt(num_positions)


def is_colinear(geom):
    """True when every position and base station lies on one line."""

    coords = np.vstack([geom.points, geom.bs_positions])
    centred = coords - coords[0]
    span = np.max(np.abs(centred)) or 1.0
    direction = centred[np.argmax(np.hypot(centred[:, 0], centred[:, 1]))]
    cross = direction[0] * centred[:, 1] - direction[1] * centred[:, 0]
    return bool(np.all(np.abs(cross) <= COLINEAR_TOLERANCE * span * span))


def crlb_report(geom, features=(FEATURE_GRADIENT,)):
    features = tuple(features)
    unknown = set(features) - set(BOUND_FEATURES)
    if unknown or not features:
        raise CRLBError("Features must be among %s" % ", ".join(BOUND_FEATURES))

    jacobians, variances = [], []
    if FEATURE_GRADIENT in features:
        jacobians.append(jacobian_gradient_feature(geom))
        variances.append(geom.rho ** 2)
    if FEATURE_MEAN in features:
        jacobians.append(jacobian_mean_feature(geom))
        variances.append(geom.eta ** 2)
    phi = fim(jacobians, variances)
    bound = crlb_trace_bound(phi)

    closed_form = None
    if features == (FEATURE_GRADIENT,) and is_colinear(geom):
        try:
            closed_form = closed_form_colinear_bound(geom)
        except CRLBError:
            closed_form = None
    return CRLBReport(fim=phi, trace_bound=bound, closed_form_bound=closed_form,
                      features=features, bounded=math.isfinite(bound))


def segment_geometry(scenario, seq, start, end, sample_interval_m=None):
    """The geometry of positions start..end of a road sequence, keeping the
    base stations detected throughout with a nonzero noise."""

    rss = seq.rss[start:end + 1]
    interval = sample_interval_m or seq.sample_interval_m or 1.0
    keep, rho, eta = [], [], []
    for k, bs in enumerate(scenario.base_stations):
        column = rss[:, k]
        if not np.all(np.isfinite(column)) or bs.noise_sigma <= 0:
            continue
        gradient = float(np.mean(np.diff(column))) / interval
        keep.append(k)
        rho.append(gradient_feature_noise_std(gradient, bs.noise_sigma, interval))
        eta.append(mean_feature_noise_std(bs.noise_sigma, len(column)))
    if not keep:
        raise CRLBError("No noisy base station detected throughout the segment")
    stations = [scenario.base_stations[k] for k in keep]
    return SegmentGeometry.from_positions(
        points=seq.coords[start:end + 1],
        bs_positions=[bs.position for bs in stations],
        beta=[bs.beta for bs in stations], rho=rho, eta=eta,
        p0=[bs.p0 for bs in stations])


def geometry_from_dict(data):
    """A geometry from explicit `points`, or from `first`, `midpoint` and
    `num_positions`, plus a `base_stations` list."""

    try:
        stations = data["base_stations"]
        params = {
            "bs_positions": [bs["position"] for bs in stations],
            "beta": [bs["beta"] for bs in stations],
            "rho": [bs["rho"] for bs in stations],
            "eta": [bs.get("eta", bs["rho"]) for bs in stations],
            "p0": [bs.get("p0", 0.0) for bs in stations],
        }
        if "points" in data:
            return SegmentGeometry.from_positions(points=data["points"], **params)
        return SegmentGeometry.from_endpoints(data["first"], data["midpoint"],
                                              int(data["num_positions"]), **params)
    except (KeyError, TypeError) as error:
        raise DataError("Invalid geometry, bad or missing field: %s" % error)
