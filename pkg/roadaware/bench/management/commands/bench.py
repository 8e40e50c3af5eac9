# -*- coding: utf-8 -*-

from dataclasses import replace

from roadaware.base.commands import RoadawareCommand
from roadaware.base.config import load_config_file
from roadaware.bench.entities import RunConfig
from roadaware.bench.plots import emit_plot_data
from roadaware.bench.plots import load_run
from roadaware.bench.plots import run_to_dict
from roadaware.bench.plots import save_run
from roadaware.bench.services import PipelineConfigs
from roadaware.bench.services import run_benchmark


class Command(RoadawareCommand):
    help = "Run the localization benchmark and write plot-ready data"
    logs_name = "bench"

    def add_arguments(self, parser):
        parser.add_argument("--config", dest="config", default=None,
                            help="INI file with a [settings] section")
        parser.add_argument("--out", dest="out", default=None,
                            help="Output directory (default: BENCH_OUTPUT_DIR)")

    def run(self, **options):
        overrides = load_config_file(options["config"]) if options["config"] else None
        run_config = RunConfig.from_settings(overrides)
        if options["out"]:
            run_config = replace(run_config, output_dir=options["out"])

        run = run_benchmark(run_config, PipelineConfigs.from_settings(overrides))
        run_path = save_run(run_to_dict(run), run_config.output_dir)
        paths = emit_plot_data(load_run(run_path), run_config.output_dir)

        for method, metrics in sorted(run.metrics.items()):
            self.stdout.write("%-6s fixes %5d  MDE %8.3f m  RMSE %8.3f m  delay %10.1f us"
                              % (method, metrics.fixes, metrics.mde_m, metrics.rmse_m,
                                 metrics.mean_delay_us))
        self.stdout.write("Wrote %s and %d series" % (run_path, len(paths)))
