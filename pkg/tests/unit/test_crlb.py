# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

from roadaware.base.exceptions import CRLBError
from roadaware.base.exceptions import DataError
from roadaware.base.exceptions import DomainError
from roadaware.crlb.entities import FEATURE_GRADIENT
from roadaware.crlb.entities import FEATURE_MEAN
from roadaware.crlb.entities import SegmentGeometry
from roadaware.crlb.services import closed_form_colinear_bound
from roadaware.crlb.services import crlb_report
from roadaware.crlb.services import crlb_trace_bound
from roadaware.crlb.services import endpoint_ratio
from roadaware.crlb.services import fim
from roadaware.crlb.services import geometry_from_dict
from roadaware.crlb.services import gradient_feature_model
from roadaware.crlb.services import gradient_feature_noise_std
from roadaware.crlb.services import gradient_fim
from roadaware.crlb.services import is_colinear
from roadaware.crlb.services import jacobian_gradient_feature
from roadaware.crlb.services import jacobian_mean_feature
from roadaware.crlb.services import mean_feature_model
from roadaware.crlb.services import mean_feature_noise_std
from roadaware.crlb.services import segment_geometry
from roadaware.crlb.services import verify_prop2
from roadaware.crlb.services import verify_prop3
from roadaware.scenario.services import generate_dataset

from ..factories import MacroStationFactory
from ..factories import ScenarioFactory
from ..factories import SmallStationFactory


def radial_geometry(rho=0.5, beta=3.0):
    """Positions 2, 20, 200 and 2000 m from a base station at the origin:
    every step adds exactly 1 to log10 of the distance."""

    points = [(2.0, 0.0), (20.0, 0.0), (200.0, 0.0), (2000.0, 0.0)]
    return SegmentGeometry.from_positions(points, [(0.0, 0.0)], beta=beta, rho=rho,
                                          eta=1.0)


def planar_geometry():
    return SegmentGeometry.from_endpoints(
        first=(10.0, 5.0), midpoint=(30.0, 12.0), num_positions=20,
        bs_positions=[(0.0, 40.0), (60.0, -20.0), (-30.0, -10.0)],
        beta=[3.5, 3.0, 3.0], rho=[0.4, 0.8, 0.6], eta=[1.0, 0.5, 0.7],
        p0=[-10.0, -25.0, -25.0])


def central_difference(model, geom, axis, step=1e-4):
    offset = np.zeros(2)
    offset[axis] = step
    midpoint = np.asarray(geom.midpoint)
    high = model(geom.moved(tuple(midpoint + offset)))
    low = model(geom.moved(tuple(midpoint - offset)))
    return (high - low) / (2.0 * step)


def test_endpoint_parameterization():
    geom = SegmentGeometry.from_endpoints((0.0, 0.0), (5.0, 0.0), 10, [(0.0, 50.0)],
                                          beta=3.0, rho=1.0, eta=1.0)
    assert geom.points[:, 0].tolist() == pytest.approx([1.0 * i for i in range(1, 11)])
    assert geom.points[4].tolist() == [5.0, 0.0]


@pytest.mark.parametrize("model, jacobian", [
    (gradient_feature_model, jacobian_gradient_feature),
    (mean_feature_model, jacobian_mean_feature),
])
def test_jacobian_matches_finite_differences(model, jacobian):
    geom = planar_geometry()
    analytic = jacobian(geom)
    assert analytic.shape == (3, 2)
    for axis in (0, 1):
        numeric = central_difference(model, geom, axis)
        assert analytic[:, axis] == pytest.approx(numeric, rel=1e-5, abs=1e-9)


def test_trace_bound_is_below_inverse_trace():
    phi = gradient_fim(planar_geometry())
    assert np.allclose(phi, phi.T)
    assert crlb_trace_bound(phi) <= float(np.trace(np.linalg.inv(phi))) + 1e-12


def test_trace_bound_of_random_matrices(rng):
    for _ in range(50):
        factor = rng.normal(size=(2, 2))
        phi = factor @ factor.T + 1e-3 * np.eye(2)
        assert crlb_trace_bound(phi) <= float(np.trace(np.linalg.inv(phi))) * (1 + 1e-9)


def test_zero_information_is_unbounded():
    assert crlb_trace_bound(np.zeros((2, 2))) == math.inf


def test_fim_rejects_singular_noise():
    with pytest.raises(CRLBError):
        fim(np.ones((1, 2)), [0.0])
    with pytest.raises(CRLBError):
        fim([np.ones((1, 2))], [[1.0], [1.0]])


def test_closed_form_on_radial_path():
    geom = radial_geometry()
    report = crlb_report(geom)
    assert is_colinear(geom)
    assert report.closed_form_bound == pytest.approx(report.trace_bound, rel=1e-9)
    assert report.trace_bound == pytest.approx(
        4.0 / float(np.trace(gradient_fim(geom))), rel=1e-12)


def test_closed_form_scales_with_noise_variance():
    low = closed_form_colinear_bound(radial_geometry(rho=0.5))
    high = closed_form_colinear_bound(radial_geometry(rho=1.5))
    assert high == pytest.approx(9.0 * low)


def test_closed_form_only_for_colinear_gradient():
    assert crlb_report(planar_geometry()).closed_form_bound is None
    report = crlb_report(radial_geometry(), (FEATURE_GRADIENT, FEATURE_MEAN))
    assert report.closed_form_bound is None
    assert report.trace_bound < crlb_report(radial_geometry()).trace_bound


def test_unknown_feature():
    with pytest.raises(CRLBError):
        crlb_report(radial_geometry(), ("variance",))


def test_endpoint_ratio():
    geom = radial_geometry()
    distances = geom.distances[:, 0]
    assert endpoint_ratio(geom, [distances.max()], [distances.min()]) == pytest.approx(1.0)
    assert endpoint_ratio(geom, [distances[0]], [distances[-1]]) >= 1.0
    assert endpoint_ratio(geom, [200.0], [20.0]) >= 1.0
    with pytest.raises(CRLBError):
        endpoint_ratio(geom, [1.0], [20.0])


def test_adding_the_mean_feature():
    check = verify_prop2(planar_geometry())
    assert check.holds
    assert check.decrease > 0
    assert check.decrease == pytest.approx(4.0 * check.b / (check.a * (check.a + check.b)))


def test_far_base_station_adds_nothing():
    geom = SegmentGeometry.from_endpoints(
        (0.0, 10.0), (5.0, 10.0), 10, [(3.0, 0.0), (1e6, 1e6)], beta=3.0,
        rho=[0.1, 1.0], eta=1.0)
    assert verify_prop3(geom).holds
    assert not verify_prop3(geom, bs_index=0).holds


def test_gradient_noise_std():
    assert gradient_feature_noise_std(0.0, 1.0) == pytest.approx(2.0 * math.sqrt(2.0))
    first_order = 2.0 * 3.0 * 0.1 * math.sqrt(2.0)
    assert gradient_feature_noise_std(3.0, 0.1) == pytest.approx(first_order, rel=1e-2)
    assert mean_feature_noise_std(2.0, 16) == 0.5


def test_invalid_geometry():
    with pytest.raises(CRLBError):
        SegmentGeometry.from_positions([(0, 0), (1, 0)], [(0, 5)], 3.0, 1.0, 1.0)
    with pytest.raises(CRLBError):
        SegmentGeometry.from_positions([(0, 0), (1, 0), (2, 0)], [(0, 5)], 3.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        SegmentGeometry.from_positions([(0, 0), (1, 0), (2, 0)], [(1, 0)], 3.0, 1.0, 1.0)


def test_geometry_from_dict():
    geom = geometry_from_dict({
        "first": [0, 0], "midpoint": [5, 0], "num_positions": 10,
        "base_stations": [{"position": [0, 50], "beta": 3.0, "rho": 0.5}]})
    assert geom.num_positions == 10
    assert geom.eta.tolist() == [0.5]
    with pytest.raises(DataError):
        geometry_from_dict({"points": [[0, 0], [1, 0], [2, 0]]})


def test_segment_geometry_from_scenario():
    scenario = ScenarioFactory(base_stations=[MacroStationFactory(noise_sigma=1.0),
                                              SmallStationFactory(id=2, noise_sigma=0.0)])
    seq = generate_dataset(scenario)[0]
    geom = segment_geometry(scenario, seq, 10, 29)
    assert geom.num_positions == 20
    assert geom.num_base_stations == 1
    assert geom.eta.tolist() == pytest.approx([1.0 / math.sqrt(20)])
    assert crlb_report(geom).bounded


def random_geometry(rng):
    """A straight segment of 5 to 40 positions observed by 2 to 4 base
    stations at least 20 m away from every position."""

    first = rng.uniform(-50.0, 50.0, 2)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    length = rng.uniform(5.0, 60.0)
    midpoint = first + 0.5 * length * np.array([math.cos(angle), math.sin(angle)])
    num_positions = int(rng.integers(5, 41))
    num_bs = int(rng.integers(2, 5))
    steps = 2.0 * np.arange(1, num_positions + 1) / num_positions
    points = first + steps[:, None] * (midpoint - first)
    bs_positions = []
    while len(bs_positions) < num_bs:
        candidate = rng.uniform(-200.0, 200.0, 2)
        if np.min(np.hypot(*(points - candidate).T)) >= 20.0:
            bs_positions.append(candidate)
    return SegmentGeometry.from_endpoints(
        tuple(first), tuple(midpoint), num_positions, bs_positions,
        beta=rng.uniform(2.0, 4.0, num_bs), rho=rng.uniform(0.1, 2.0, num_bs),
        eta=rng.uniform(0.1, 2.0, num_bs))


def test_colinear_bound_needs_unit_steps():
    # Every step adds log10(2) to log10 of the distance.
    points = [(2.0, 0.0), (4.0, 0.0), (8.0, 0.0), (16.0, 0.0)]
    geom = SegmentGeometry.from_positions(points, [(0.0, 0.0)], beta=3.0, rho=0.5, eta=1.0)
    report = crlb_report(geom)
    assert is_colinear(geom)
    assert report.trace_bound == pytest.approx(
        report.closed_form_bound / math.log10(2.0) ** 2, rel=1e-9)
    assert report.trace_bound != pytest.approx(report.closed_form_bound, rel=0.1)


def test_jacobians_on_random_geometries(rng):
    for _ in range(1000):
        geom = random_geometry(rng)
        for model, jacobian in ((gradient_feature_model, jacobian_gradient_feature),
                                (mean_feature_model, jacobian_mean_feature)):
            analytic = jacobian(geom)
            slack = 1e-6 * float(np.max(np.abs(analytic))) + 1e-9 * float(
                np.max(np.abs(model(geom))))
            for axis in (0, 1):
                numeric = central_difference(model, geom, axis)
                assert analytic[:, axis] == pytest.approx(numeric, rel=1e-4, abs=slack)


def test_information_bounds_on_random_geometries(rng):
    checked = 0
    for _ in range(1000):
        report = crlb_report(random_geometry(rng), (FEATURE_GRADIENT, FEATURE_MEAN))
        phi = report.fim
        assert np.array_equal(phi, phi.T)
        eigenvalues = np.linalg.eigvalsh(phi)
        assert eigenvalues.min() >= -1e-9 * eigenvalues.max()
        if np.linalg.cond(phi) > 1e12:
            continue
        assert report.trace_bound < float(np.trace(np.linalg.inv(phi)))
        checked += 1
    assert checked >= 900
