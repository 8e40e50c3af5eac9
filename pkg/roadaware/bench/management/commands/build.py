# -*- coding: utf-8 -*-

from roadaware.base.commands import RoadawareCommand
from roadaware.base.config import load_config_file
from roadaware.curvefit.entities import CurveFitConfig
from roadaware.features.entities import SFConfig
from roadaware.msvl.entities import LocatorConfig
from roadaware.msvl.profile import save_profile
from roadaware.msvl.services import build_profile_db
from roadaware.scenario.dataset import load_dataset
from roadaware.segmentation.entities import SegmentationConfig


class Command(RoadawareCommand):
    help = "Build a road profile database from a dataset"
    logs_name = "build"

    def add_arguments(self, parser):
        parser.add_argument("--data", dest="data", required=True, help="Dataset CSV file")
        parser.add_argument("--config", dest="config", default=None,
                            help="INI file with a [settings] section")
        parser.add_argument("--out", dest="out", required=True, help="Profile JSON file")

    def run(self, **options):
        overrides = load_config_file(options["config"]) if options["config"] else None
        dataset = load_dataset(options["data"])
        db = build_profile_db(dataset, SegmentationConfig.from_settings(overrides),
                              SFConfig.from_settings(overrides),
                              CurveFitConfig.from_settings(overrides),
                              locator=LocatorConfig.from_settings(overrides))
        save_profile(db, options["out"])
        segments = sum(len(road.segments) for road in db.roads)
        self.stdout.write("Wrote %d roads, %d segments to %s"
                          % (len(db.roads), segments, options["out"]))
