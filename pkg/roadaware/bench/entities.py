# -*- coding: utf-8 -*-

from dataclasses import dataclass
from dataclasses import field
from typing import Optional
from typing import Tuple

from roadaware.base.config import as_float_list
from roadaware.base.config import as_str_list
from roadaware.base.config import get_setting
from roadaware.base.exceptions import ConfigurationError

# Localization methods the harness can replay.
METHOD_MSVL = "msvl"
METHOD_RWKNN = "rwknn"
METHOD_GIFT = "gift"
METHOD_CFELS = "cfels"
METHODS = (METHOD_MSVL, METHOD_RWKNN, METHOD_GIFT, METHOD_CFELS)

# Sweep axes.
SWEEP_NONE = "none"
SWEEP_BS_COUNT = "bs_count"
SWEEP_GRID_SIZE = "grid_size"
SWEEP_SNR = "snr"
SWEEPS = (SWEEP_NONE, SWEEP_BS_COUNT, SWEEP_GRID_SIZE, SWEEP_SNR)


def _optional_float(value):
    if value is None or str(value).strip() == "":
        return None
    return float(value)


def _int_list(value):
    return [int(v) for v in as_float_list(value)]


@dataclass(frozen=True)
class RunConfig:
    scenario_file: Optional[str] = None
    methods: Tuple[str, ...] = METHODS
    sweep: str = SWEEP_NONE
    sweep_values: Tuple[float, ...] = ()
    trials: int = 1
    seed: int = 0
    output_dir: str = "bench-output"
    # None keeps the noise of the scenario.
    snr_db: Optional[float] = None
    stride: int = 5
    workers: int = 1
    queue_timeout_s: float = 1.0
    cfels_step_m: float = 1.0
    cdf_resolution: int = 100
    latency_road_counts: Tuple[int, ...] = ()
    latency_segment_counts: Tuple[int, ...] = ()
    latency_repeats: int = 100
    progress: bool = True

    def __post_init__(self):
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigurationError("methods must be among %s" % ", ".join(METHODS))
        if self.sweep not in SWEEPS:
            raise ConfigurationError("sweep must be one of %s" % ", ".join(SWEEPS))
        if self.sweep != SWEEP_NONE and not self.sweep_values:
            raise ConfigurationError("the %s sweep needs values" % self.sweep)
        if self.trials < 1:
            raise ConfigurationError("trials must be at least 1")
        if self.stride < 1:
            raise ConfigurationError("stride must be at least 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if not self.cfels_step_m > 0:
            raise ConfigurationError("the CF-ELS step must be positive")
        if self.cdf_resolution < 2:
            raise ConfigurationError("the CDF resolution must be at least 2")
        if self.latency_repeats < 1:
            raise ConfigurationError("latency repeats must be at least 1")
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))

    @classmethod
    def from_settings(cls, overrides=None):
        scenario_file = get_setting("BENCH_SCENARIO_FILE", str, overrides)
        return cls(
            scenario_file=scenario_file or None,
            methods=tuple(get_setting("BENCH_METHODS", as_str_list, overrides)),
            sweep=get_setting("BENCH_SWEEP", str, overrides),
            sweep_values=tuple(get_setting("BENCH_SWEEP_VALUES", as_float_list, overrides)),
            trials=get_setting("BENCH_TRIALS", int, overrides),
            seed=get_setting("BENCH_SEED", int, overrides),
            output_dir=get_setting("BENCH_OUTPUT_DIR", str, overrides),
            snr_db=get_setting("BENCH_SNR_DB", _optional_float, overrides),
            stride=get_setting("BENCH_STRIDE", int, overrides),
            workers=get_setting("BENCH_WORKERS", int, overrides),
            queue_timeout_s=get_setting("BENCH_QUEUE_TIMEOUT_S", float, overrides),
            cfels_step_m=get_setting("BENCH_CFELS_STEP_M", float, overrides),
            cdf_resolution=get_setting("BENCH_CDF_RESOLUTION", int, overrides),
            latency_road_counts=tuple(get_setting("BENCH_LATENCY_ROAD_COUNTS", _int_list,
                                                  overrides)),
            latency_segment_counts=tuple(get_setting("BENCH_LATENCY_SEGMENT_COUNTS",
                                                     _int_list, overrides)),
            latency_repeats=get_setting("BENCH_LATENCY_REPEATS", int, overrides),
            progress=get_setting("BENCH_PROGRESS", bool, overrides))


@dataclass(frozen=True)
class FixRecord:
    """One replayed fix: the truth, the estimate and the call latency."""
    method: str
    trial: int
    road_id: int
    position: int
    truth: Tuple[float, float]
    estimate: Optional[Tuple[float, float]]
    error_m: Optional[float]
    latency_us: float
    segment_correct: Optional[bool] = None


@dataclass(frozen=True)
class BenchmarkMetrics:
    method: str
    mde_m: float
    rmse_m: float
    cdf: Tuple[Tuple[float, float], ...]
    mean_delay_us: float
    fixes: int
    located: int
    segment_accuracy: Optional[float] = None
    records: Tuple[FixRecord, ...] = field(default=(), repr=False)
