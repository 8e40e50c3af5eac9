# -*- coding: utf-8 -*-

import factory

from roadaware.scenario.entities import BAND_MACRO_4G
from roadaware.scenario.entities import BAND_SMALL_5G
from roadaware.scenario.entities import BaseStation
from roadaware.scenario.entities import RoadGeometry
from roadaware.scenario.entities import Scenario


class Factory(factory.Factory):
    class Meta:
        model = None
        abstract = True


class MacroStationFactory(Factory):
    class Meta:
        model = BaseStation

    id = 1
    position = (0.0, -20.0)
    band = BAND_MACRO_4G
    p0 = -10.0
    beta = 3.5
    noise_sigma = 0.0


class SmallStationFactory(MacroStationFactory):
    id = factory.Sequence(lambda n: n + 2)
    position = (60.0, 15.0)
    band = BAND_SMALL_5G
    p0 = -25.0
    beta = 3.0


class RoadGeometryFactory(Factory):
    class Meta:
        model = RoadGeometry

    road_id = factory.Sequence(lambda n: n + 1)
    polyline = ((0.0, 0.0), (80.0, 0.0))
    sample_interval_m = 1.0


class ScenarioFactory(Factory):
    """Two parallel 80 m roads, a macro BS south of them and a small cell
    between them."""

    class Meta:
        model = Scenario

    base_stations = factory.LazyFunction(
        lambda: [MacroStationFactory(), SmallStationFactory(id=2)])
    roads = factory.LazyFunction(
        lambda: [RoadGeometryFactory(road_id=1, polyline=((0.0, 0.0), (80.0, 0.0))),
                 RoadGeometryFactory(road_id=2, polyline=((0.0, 30.0), (80.0, 30.0)))])
    seed = 3
