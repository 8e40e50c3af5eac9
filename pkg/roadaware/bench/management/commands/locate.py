# -*- coding: utf-8 -*-

import csv
import math

from roadaware.base.commands import RoadawareCommand
from roadaware.base.config import load_config_file
from roadaware.base.exceptions import ConfigurationError
from roadaware.base.exceptions import RoadawareError
from roadaware.base.utils.time import elapsed_us
from roadaware.base.utils.time import monotonic_us
from roadaware.baselines.entities import BaselineConfig
from roadaware.baselines.services import build_fingerprint_grid
from roadaware.baselines.services import cf_els_locate
from roadaware.baselines.services import fit_cfels_models
from roadaware.baselines.services import gift_locate
from roadaware.baselines.services import query_gradient
from roadaware.baselines.services import rwknn_locate
from roadaware.bench.entities import METHOD_CFELS
from roadaware.bench.entities import METHOD_GIFT
from roadaware.bench.entities import METHOD_MSVL
from roadaware.bench.entities import METHOD_RWKNN
from roadaware.bench.entities import METHODS
from roadaware.msvl.entities import LocatorConfig
from roadaware.msvl.entities import OnlineBuffer
from roadaware.msvl.profile import load_profile
from roadaware.msvl.services import locate
from roadaware.scenario.dataset import load_dataset
from roadaware.scenario.services import load_scenario

OUTPUT_COLUMNS = ["road_id", "position", "method", "x", "y", "road", "segment",
                  "posterior", "latency_us", "error_m"]


class Command(RoadawareCommand):
    help = "Replay an RSS stream through a localizer and print one fix per record"
    logs_name = "locate"

    def add_arguments(self, parser):
        parser.add_argument("--profile", dest="profile", default=None,
                            help="Profile JSON file (msvl)")
        parser.add_argument("--input", dest="input", required=True,
                            help="RSS stream in the dataset CSV format")
        parser.add_argument("--method", dest="method", choices=METHODS,
                            default=METHOD_MSVL)
        parser.add_argument("--data", dest="data", default=None,
                            help="Training dataset CSV file (baselines)")
        parser.add_argument("--scenario", dest="scenario", default=None,
                            help="Scenario JSON file (cfels)")
        parser.add_argument("--config", dest="config", default=None,
                            help="INI file with a [settings] section")

    def run(self, **options):
        overrides = load_config_file(options["config"]) if options["config"] else None
        method = options["method"]
        locator_config = LocatorConfig.from_settings(overrides)
        capacity = locator_config.buffer_capacity
        baselines = BaselineConfig.from_settings(overrides)
        locator = self.make_locator(method, options, baselines, locator_config)

        writer = csv.writer(self.stdout, lineterminator="\n")
        writer.writerow(OUTPUT_COLUMNS)
        for seq in load_dataset(options["input"]):
            interval = seq.sample_interval_m or float(seq.steps().mean())
            buffer = OnlineBuffer(capacity, interval)
            for position, rss in enumerate(seq.rss):
                buffer.push(rss)
                if not buffer.is_full:
                    continue
                start = monotonic_us()
                try:
                    row = locator(buffer)
                except RoadawareError as error:
                    self.stderr.write("road %s position %d: %s" % (seq.road_id, position,
                                                                   error))
                    row = {}
                row["latency_us"] = row.get("latency_us", elapsed_us(start))
                if row.get("x") is not None:
                    truth = seq.coords[position]
                    row["error_m"] = math.hypot(row["x"] - truth[0], row["y"] - truth[1])
                row.update(road_id=seq.road_id, position=position, method=method)
                writer.writerow(["" if row.get(column) is None else row[column]
                                 for column in OUTPUT_COLUMNS])

    def make_locator(self, method, options, baselines, locator_config):
        """Returns a function from a full buffer to an output row."""

        if method == METHOD_MSVL:
            if not options["profile"]:
                raise ConfigurationError("--profile is required with --method msvl")
            db = load_profile(options["profile"])

            def msvl(buffer):
                fix = locate(buffer, db, locator_config.rss_span)
                coord = fix.coord or (None, None)
                return {"x": coord[0], "y": coord[1], "road": fix.road_id,
                        "segment": fix.segment_id, "posterior": fix.posterior,
                        "latency_us": fix.latency_us}
            return msvl

        if not options["data"]:
            raise ConfigurationError("--data is required with --method %s" % method)
        training = load_dataset(options["data"])

        if method == METHOD_CFELS:
            if not options["scenario"]:
                raise ConfigurationError("--scenario is required with --method cfels")
            scenario = load_scenario(options["scenario"])
            model = fit_cfels_models(training, [bs.position for bs in scenario.base_stations])

            def find(buffer):
                return cf_els_locate(model, buffer.latest, baselines.cfels_step_m)
        else:
            grid = build_fingerprint_grid(training, baselines.grid_size_m)
            if method == METHOD_RWKNN:
                def find(buffer):
                    return rwknn_locate(grid, buffer.latest, baselines.rwknn_k,
                                        baselines.rwknn_radius_cells)
            elif method == METHOD_GIFT:
                def find(buffer):
                    return gift_locate(grid, query_gradient(buffer.rss,
                                                            buffer.sample_interval_m))

        def baseline(buffer):
            coord = find(buffer).coord
            return {"x": coord[0], "y": coord[1]}
        return baseline
