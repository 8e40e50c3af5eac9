# -*- coding: utf-8 -*-

import csv

from roadaware.base.commands import RoadawareCommand
from roadaware.base.exceptions import DataError
from roadaware.base.utils import json
from roadaware.crlb.entities import FEATURE_GRADIENT
from roadaware.crlb.entities import FEATURE_MEAN
from roadaware.crlb.services import crlb_report
from roadaware.crlb.services import geometry_from_dict

# The feature sets reported for every geometry.
FEATURE_SETS = ((FEATURE_GRADIENT,), (FEATURE_MEAN,), (FEATURE_GRADIENT, FEATURE_MEAN))

OUTPUT_COLUMNS = ["geometry", "features", "trace_bound_m2", "closed_form_bound_m2",
                  "bounded", "fim_11", "fim_12", "fim_22"]


class Command(RoadawareCommand):
    help = "Compute CRLB trace bounds of segment geometries"
    logs_name = "crlb"

    def add_arguments(self, parser):
        parser.add_argument("--geom", dest="geom", required=True,
                            help="JSON geometry, or an object with a 'geometries' list")

    def run(self, **options):
        try:
            data = json.load_file(options["geom"])
        except ValueError as error:
            raise DataError("Unreadable geometry file: %s" % error)
        if not isinstance(data, dict):
            raise DataError("A geometry file holds a JSON object")
        geometries = data.get("geometries", [data])

        writer = csv.writer(self.stdout, lineterminator="\n")
        writer.writerow(OUTPUT_COLUMNS)
        for index, geometry in enumerate(geometries):
            geom = geometry_from_dict(geometry)
            for features in FEATURE_SETS:
                report = crlb_report(geom, features)
                closed = report.closed_form_bound
                writer.writerow([index, "+".join(features), report.trace_bound,
                                 "" if closed is None else closed, int(report.bounded),
                                 report.fim[0, 0], report.fim[0, 1], report.fim[1, 1]])
