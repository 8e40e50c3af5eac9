# -*- coding: utf-8 -*-

from roadaware.base.commands import RoadawareCommand
from roadaware.base.config import load_config_file
from roadaware.scenario.dataset import save_dataset
from roadaware.scenario.services import desk_scenario_from_settings
from roadaware.scenario.services import generate_dataset
from roadaware.scenario.services import load_scenario
from roadaware.scenario.services import noise_sigmas_for_snr
from roadaware.scenario.services import save_scenario
from roadaware.scenario.services import with_noise


class Command(RoadawareCommand):
    help = "Generate a simulated RSS dataset, one traversal per road"
    logs_name = "generate"

    def add_arguments(self, parser):
        parser.add_argument("--scenario", dest="scenario", default=None,
                            help="Scenario JSON file (default: the desk scenario)")
        parser.add_argument("--seed", dest="seed", type=int, default=None,
                            help="Noise seed (default: the scenario seed)")
        parser.add_argument("--snr", dest="snr", type=float, default=None,
                            help="Replace the scenario noise by a target SNR in dB")
        parser.add_argument("--config", dest="config", default=None,
                            help="INI file with a [settings] section")
        parser.add_argument("--out", dest="out", required=True,
                            help="Dataset CSV file to write")
        parser.add_argument("--save-scenario", dest="save_scenario", default=None,
                            help="Also write the scenario used as JSON")

    def run(self, **options):
        overrides = load_config_file(options["config"]) if options["config"] else None
        if options["scenario"]:
            scenario = load_scenario(options["scenario"], overrides=overrides)
        else:
            scenario = desk_scenario_from_settings(overrides=overrides)
        if options["snr"] is not None:
            scenario = with_noise(scenario, noise_sigmas_for_snr(scenario, options["snr"]))
        if options["save_scenario"]:
            save_scenario(scenario, options["save_scenario"])

        dataset = generate_dataset(scenario, options["seed"])
        save_dataset(dataset, options["out"])
        self.stdout.write("Wrote %d roads, %d records to %s"
                          % (len(dataset), sum(len(seq) for seq in dataset), options["out"]))
