# -*- coding: utf-8 -*-

import numpy as np
import pytest
from numpy.polynomial import polynomial

from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import CurveFitError
from roadaware.base.exceptions import RankDeficientFit
from roadaware.curvefit.entities import CurveFitConfig
from roadaware.curvefit.entities import FittedCurve
from roadaware.curvefit.services import curve_residual
from roadaware.curvefit.services import evaluate
from roadaware.curvefit.services import fit_curve
from roadaware.curvefit.services import fit_segment_curves
from roadaware.curvefit.services import map_coordinate


def test_linear_road_is_recovered(two_roads):
    segment = two_roads[0].slice(25, 49)
    curves = fit_segment_curves(segment, 3, scope=(1, 2), skip_degenerate=True)
    assert [curve.bs_index for curve in curves] == [0]
    assert curves[0].scope == (1, 2, 0)
    assert curves[0].fit_residual == pytest.approx(0.0, abs=1e-6)
    x, y = evaluate(curves[0], -50.0)
    assert x == pytest.approx(40.0, abs=1e-6)
    assert y == pytest.approx(0.0, abs=1e-6)


def test_power_basis_coefficients():
    rss = np.linspace(-80.0, -60.0, 21)
    coords = np.column_stack([2.0 + 0.5 * rss + 0.01 * rss ** 2, -rss])
    curve = fit_curve(rss, coords, 2, 0)
    assert curve.theta == pytest.approx([2.0, 0.5, 0.01], abs=1e-6)
    assert curve.alpha == pytest.approx([0.0, -1.0, 0.0], abs=1e-6)


def test_order_drops_with_few_distinct_values():
    rss = np.array([-60.0, -60.0, -61.0, -61.0])
    coords = np.column_stack([np.arange(4.0), np.zeros(4)])
    assert fit_curve(rss, coords, 3, 0).order == 1


def test_least_squares_beats_perturbations(rng):
    rss = np.sort(rng.uniform(-90.0, -60.0, 30))
    coords = np.column_stack([np.linspace(0.0, 29.0, 30) + rng.normal(0, 0.5, 30),
                              rng.normal(0, 0.5, 30)])
    curve = fit_curve(rss, coords, 3, 0)
    best = curve_residual(curve.theta, curve.alpha, rss, coords)
    scale = np.abs(curve.theta) * 1e-3 + 1e-9
    for _ in range(100):
        theta = curve.theta + rng.normal(size=4) * scale
        alpha = curve.alpha + rng.normal(size=4) * (np.abs(curve.alpha) * 1e-3 + 1e-9)
        assert curve_residual(theta, alpha, rss, coords) >= best - 1e-9


def test_constant_rss_is_rank_deficient(two_roads):
    segment = two_roads[0].slice(25, 49)
    with pytest.raises(RankDeficientFit) as error:
        fit_segment_curves(segment, 3, scope=(1, 2))
    assert error.value.bs_index == 1
    assert str(error.value).startswith("segment (1, 2): ")


def test_no_usable_base_station():
    rss = np.full(5, -70.0)
    with pytest.raises(RankDeficientFit):
        fit_curve(rss, np.zeros((5, 2)), 3, 0)
    with pytest.raises(CurveFitError):
        fit_curve(np.array([-70.0, np.nan, -71.0]), np.zeros((3, 2)), 1, 0)


def test_map_coordinate_averages_curves():
    bounds = (-100.0, -100.0, 100.0, 100.0)
    first = FittedCurve(scope=(1, 1, 0), bs_index=0, order=1, theta=[1.0, 0.0],
                        alpha=[2.0, 0.0], fit_residual=0.0, bounds=bounds)
    second = FittedCurve(scope=(1, 1, 1), bs_index=1, order=1, theta=[0.0, -0.1],
                         alpha=[0.0, 0.0], fit_residual=0.0, bounds=bounds)
    x, y = map_coordinate([first, second], [-60.0, -50.0])
    assert x == pytest.approx((1.0 + 5.0) / 2)
    assert y == pytest.approx(1.0)
    # An undetected base station drops out of the mean.
    assert map_coordinate([first, second], [-60.0, np.nan]) == (1.0, 2.0)


def test_map_coordinate_clamps_to_box():
    curve = FittedCurve(scope=(), bs_index=0, order=1, theta=[0.0, -10.0],
                        alpha=[0.0, 0.0], fit_residual=0.0, bounds=(0.0, 0.0, 50.0, 5.0))
    assert map_coordinate([curve], [-60.0]) == (50.0, 0.0)


def test_map_coordinate_without_match():
    curve = FittedCurve(scope=(), bs_index=1, order=1, theta=[0.0, 1.0],
                        alpha=[0.0, 1.0], fit_residual=0.0)
    with pytest.raises(CurveFitError):
        map_coordinate([curve], [-60.0, np.nan])


def test_curve_coefficient_count():
    with pytest.raises(CurveFitError):
        FittedCurve(scope=(), bs_index=0, order=2, theta=[0.0, 1.0], alpha=[0.0, 1.0],
                    fit_residual=0.0)


def test_invalid_config():
    with pytest.raises(ConfigurationError):
        CurveFitConfig(order=0)


def test_evaluate_uses_power_basis():
    curve = FittedCurve(scope=(), bs_index=0, order=2, theta=[1.0, 2.0, 3.0],
                        alpha=[0.0, 0.0, 1.0], fit_residual=0.0)
    assert evaluate(curve, -2.0) == (polynomial.polyval(-2.0, [1.0, 2.0, 3.0]), 4.0)
