# -*- coding: utf-8 -*-

import math
import warnings
from collections import defaultdict

import numpy as np

from roadaware.base.exceptions import CurveFitError
from roadaware.base.exceptions import DataError
from roadaware.base.exceptions import LocalizationError
from roadaware.base.logs import Logs
from roadaware.scenario.services import gradient_matrix

from .entities import BaselineFix
from .entities import CFELSModel
from .entities import FingerprintGrid
from .entities import ReferencePoint

# Gradient vectors closer than this to zero carry no position information.
ZERO_GRADIENT_TOLERANCE = 1e-12

# Grid rows scanned at once by CF-ELS.
CFELS_CHUNK_ROWS = 64

# The number of trailing records averaged into a GIFT query gradient.
GIFT_QUERY_WINDOW = 3

logs = Logs(name="baselines")


def _nanmean(rows):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        return np.nanmean(rows, axis=0)


def position_gradients(seq):
    """Per-position gradients: the gradient leaving each position, and the
    one entering it at the last position."""

    gradients = gradient_matrix(seq)
    return np.vstack([gradients, gradients[-1:]])


def build_fingerprint_grid(dataset, grid_size_m):
    """Reference points from the mean coordinate, RSS and gradient of the
    samples falling in each grid cell."""

    members = defaultdict(list)
    for seq in dataset:
        gradients = position_gradients(seq)
        for coord, rss, gradient in zip(seq.coords, seq.rss, gradients):
            cell = (int(math.floor(coord[0] / grid_size_m)),
                    int(math.floor(coord[1] / grid_size_m)))
            members[cell].append((coord, rss, gradient))

    reference_points = []
    for cell in sorted(members):
        coords, rss, gradients = (np.array(column) for column in zip(*members[cell]))
        mean_rss = _nanmean(rss)
        if not np.any(np.isfinite(mean_rss)):
            continue
        mean_coord = coords.mean(axis=0)
        reference_points.append(ReferencePoint(
            cell=cell, coord=(float(mean_coord[0]), float(mean_coord[1])),
            rss=mean_rss, gradient=_nanmean(gradients)))
    logs.info("Fingerprint grid of %d reference points at %s m"
              % (len(reference_points), grid_size_m))
    return FingerprintGrid(grid_size_m=float(grid_size_m),
                           reference_points=tuple(reference_points))


def signal_distances(references, query):
    """Euclidean distance from the query to every row over the dimensions both
    detect; inf where they share none."""

    query = np.asarray(query, dtype=float).reshape(-1)
    if references.shape[1] != query.size:
        raise DataError("Query of %d values for fingerprints of %d"
                        % (query.size, references.shape[1]))
    shared = np.isfinite(references) & np.isfinite(query)[None, :]
    squares = np.where(shared, (references - query) ** 2, 0.0)
    distances = np.sqrt(squares.sum(axis=1))
    distances[~shared.any(axis=1)] = np.inf
    return distances


def weighted_neighbours(coords, distances, k):
    """Inverse-distance weighted mean of the k nearest coordinates; an exact
    match returns its coordinate."""

    order = np.argsort(distances, kind="stable")[:k]
    order = order[np.isfinite(distances[order])]
    if order.size == 0:
        raise LocalizationError("No comparable reference point")
    if distances[order[0]] == 0:
        return coords[order[0]]
    weights = 1.0 / distances[order]
    return (coords[order] * weights[:, None]).sum(axis=0) / weights.sum()


def rwknn_locate(grid, rss, k=3, radius_cells=2):
    """Restricted weighted KNN: neighbours are taken from the cell cluster
    around the nearest reference point only."""

    if k < 1:
        raise LocalizationError("k must be at least 1")
    distances = signal_distances(grid.rss, rss)
    if not np.isfinite(distances).any():
        raise LocalizationError("No comparable reference point")
    nearest = int(np.argmin(distances))
    cluster = np.max(np.abs(grid.cells - grid.cells[nearest]), axis=1) <= radius_cells
    restricted = np.where(cluster, distances, np.inf)
    coord = weighted_neighbours(grid.coords, restricted, k)
    return BaselineFix(coord=(float(coord[0]), float(coord[1])))


def query_gradient(rss_window, sample_interval_m, window=GIFT_QUERY_WINDOW):
    """Mean gradient over the trailing records of a buffer."""

    rss_window = np.asarray(rss_window, dtype=float)[-(window + 1):]
    if rss_window.shape[0] < 2:
        raise LocalizationError("A gradient needs two records")
    return _nanmean(np.diff(rss_window, axis=0) / sample_interval_m)


def gift_locate(grid, gradient):
    """Nearest reference point in gradient space. Zero or tied queries are
    flagged ambiguous."""

    gradient = np.asarray(gradient, dtype=float)
    distances = signal_distances(grid.gradients, gradient)
    if not np.isfinite(distances).any():
        raise LocalizationError("No comparable gradient fingerprint")
    nearest = int(np.argmin(distances))
    detected = gradient[np.isfinite(gradient)]
    ambiguous = bool(np.all(np.abs(detected) <= ZERO_GRADIENT_TOLERANCE)
                     or np.count_nonzero(distances == distances[nearest]) > 1)
    if ambiguous:
        logs.debug("Ambiguous gradient query, nearest of %d reference points"
                   % np.count_nonzero(distances == distances[nearest]))
    coord = grid.coords[nearest]
    return BaselineFix(coord=(float(coord[0]), float(coord[1])), ambiguous=ambiguous,
                       residual=float(distances[nearest]))


def fit_cfels_models(dataset, bs_positions, margin_m=0.0):
    """Least-squares log-distance curves per base station over the training
    samples, and the bounding region of the roads."""

    bs_positions = np.asarray(bs_positions, dtype=float).reshape(-1, 2)
    coords = np.vstack([seq.coords for seq in dataset])
    rss = np.vstack([seq.rss for seq in dataset])
    intercepts, slopes = [], []
    for k, position in enumerate(bs_positions):
        detected = np.isfinite(rss[:, k])
        distances = np.hypot(*(coords[detected] - position).T)
        usable = distances > 0
        log_d = np.log10(distances[usable])
        if np.unique(log_d).size < 2:
            raise CurveFitError("Base station %d: too few distinct distances to fit"
                                % (k + 1))
        slope, intercept = np.polyfit(log_d, rss[detected][usable, k], 1)
        intercepts.append(intercept)
        slopes.append(-slope)
    low, high = coords.min(axis=0) - margin_m, coords.max(axis=0) + margin_m
    return CFELSModel(bs_positions=bs_positions, intercept=np.array(intercepts),
                      slope=np.array(slopes),
                      region=(float(low[0]), float(low[1]), float(high[0]), float(high[1])))


def scan_axis(low, high, step_m):
    """low, low + step, ...; halving the step yields a superset."""

    return low + step_m * np.arange(int(math.floor((high - low) / step_m)) + 1)


def prediction_residual(model, rss, points):
    """Sum of squared RSS prediction errors over the detected base stations
    at each point of an (..., 2) array."""

    rss = np.asarray(rss, dtype=float)
    detected = np.flatnonzero(np.isfinite(rss))
    points = np.asarray(points, dtype=float)
    total = np.zeros(points.shape[:-1])
    for k in detected:
        offset = points - model.bs_positions[k]
        distance = np.maximum(np.hypot(offset[..., 0], offset[..., 1]), 1e-9)
        predicted = model.intercept[k] - model.slope[k] * np.log10(distance)
        total += (predicted - rss[k]) ** 2
    return total


def cf_els_locate(model, rss, step_m):
    """Exhaustive scan of the region at step_m for the point whose predicted
    RSS is closest to the query. The first minimum in scan order wins."""

    if not step_m > 0:
        raise LocalizationError("The scan step must be positive")
    if not np.any(np.isfinite(rss)):
        raise LocalizationError("The query detects no base station")
    xs = scan_axis(model.region[0], model.region[2], step_m)
    ys = scan_axis(model.region[1], model.region[3], step_m)

    best, best_point = np.inf, None
    for start in range(0, ys.size, CFELS_CHUNK_ROWS):
        rows = ys[start:start + CFELS_CHUNK_ROWS]
        points = np.stack(np.meshgrid(xs, rows), axis=-1)
        residual = prediction_residual(model, rss, points)
        index = int(np.argmin(residual))
        if residual.flat[index] < best:
            best = float(residual.flat[index])
            row, column = divmod(index, xs.size)
            best_point = (float(xs[column]), float(rows[row]))
    return BaselineFix(coord=best_point, residual=best)
