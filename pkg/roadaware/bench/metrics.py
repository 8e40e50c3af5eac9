# -*- coding: utf-8 -*-

import math

import numpy as np

from .entities import BenchmarkMetrics


def _errors(errors):
    errors = np.asarray([e for e in errors if e is not None], dtype=float)
    return errors[np.isfinite(errors)]


def compute_mde(errors):
    """Mean distance error of the located fixes."""

    errors = _errors(errors)
    return math.fsum(errors) / errors.size if errors.size else math.nan


def compute_rmse(errors):
    errors = _errors(errors)
    return math.sqrt(math.fsum(errors * errors) / errors.size) if errors.size else math.nan


def compute_cdf(errors, resolution=100):
    """Fraction of errors at or below each of `resolution` evenly spaced
    thresholds from 0 to the largest error."""

    errors = np.sort(_errors(errors))
    if errors.size == 0:
        return []
    thresholds = np.linspace(0.0, errors[-1], resolution)
    fractions = np.searchsorted(errors, thresholds, side="right") / errors.size
    # The last threshold is the largest error itself.
    fractions[-1] = 1.0
    return [(float(t), float(f)) for t, f in zip(thresholds, fractions)]


def summarize(method, records, cdf_resolution=100):
    errors = [record.error_m for record in records]
    located = [record for record in records if record.error_m is not None]
    segments = [record.segment_correct for record in records
                if record.segment_correct is not None]
    latencies = [record.latency_us for record in records]
    return BenchmarkMetrics(
        method=method, mde_m=compute_mde(errors), rmse_m=compute_rmse(errors),
        cdf=tuple(compute_cdf(errors, cdf_resolution)),
        mean_delay_us=math.fsum(latencies) / len(latencies) if latencies else math.nan,
        fixes=len(records), located=len(located),
        segment_accuracy=(sum(segments) / len(segments)) if segments else None,
        records=tuple(records))


def linear_fit_r2(x, y):
    """Slope, intercept and coefficient of determination of a least-squares
    line."""

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - float(np.sum(residual ** 2)) / float(total) if total > 0 else 1.0
    return float(slope), float(intercept), r2
