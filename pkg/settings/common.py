# -*- coding: utf-8 -*-

import os
import sys

from decouple import config

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Only used by Django internals; nothing here is served.
SECRET_KEY = config('SECRET_KEY', default='roadaware-local')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    "roadaware.base",
    "roadaware.bench",
]

# The pipeline keeps its state in files, not in a database.
DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# The file that the Logs helper writes to.
ROADAWARE_LOG_FILE = config('ROADAWARE_LOG_FILE', default='/tmp/roadaware.log')

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "%(levelname)s:%(asctime)s: %(message)s"
        },
    },
    "handlers": {
        "null": {
            "level": "DEBUG",
            "class": "logging.NullHandler",
        },
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
    },
    "loggers": {
        "django": {
            "handlers": ["null"],
            "propagate": True,
            "level": "INFO",
        },
        "roadaware": {
            "handlers": ["console"],
            "level": config('ROADAWARE_LOG_LEVEL', default='WARNING'),
            "propagate": True,
        },
    }
}

# Scenario.
# RSS below this level is not detected, in dBm.
SCENARIO_DETECTION_FLOOR_DBM = config('SCENARIO_DETECTION_FLOOR_DBM', default=-120.0, cast=float)
# Distance between consecutive samples along a road, in meters.
SCENARIO_SAMPLE_INTERVAL_M = config('SCENARIO_SAMPLE_INTERVAL_M', default=1.0, cast=float)

# Segmentation.
# The gradient change that makes a singular point, in dB/m.
SEGMENTATION_TAU = config('SEGMENTATION_TAU', default=1.0, cast=float)
# The minimum number of positions in a segment.
SEGMENTATION_MIN_SEGMENT_LEN = config('SEGMENTATION_MIN_SEGMENT_LEN', default=5, cast=int)
# The merge penalty, or "auto" to calibrate it per road.
SEGMENTATION_PENALTY = config('SEGMENTATION_PENALTY', default='auto')

# Salient features.
# The normalized change a feature needs to pass the prefilter.
FEATURES_GAMMA = config('FEATURES_GAMMA', default=0.1, cast=float)
# The number of histogram bins of the information gain.
FEATURES_BINS = config('FEATURES_BINS', default=8, cast=int)
# The largest candidate set searched exhaustively; larger ones are greedy.
FEATURES_MAX_EXACT_SUBSET = config('FEATURES_MAX_EXACT_SUBSET', default=16, cast=int)
# A window feature whose estimated noise std exceeds this share of its spread
# over the training windows is never selected.
FEATURES_MAX_NOISE_RATIO = config('FEATURES_MAX_NOISE_RATIO', default=0.5, cast=float)

# Coordinate curves.
# The polynomial order of the RSS to coordinate curves.
CURVEFIT_ORDER = config('CURVEFIT_ORDER', default=3, cast=int)
# The relative margin of the box that estimates are clamped to.
CURVEFIT_BBOX_MARGIN = config('CURVEFIT_BBOX_MARGIN', default=0.1, cast=float)

# Online localization.
# The number of trailing records kept by the vehicle.
MSVL_BUFFER_CAPACITY = config('MSVL_BUFFER_CAPACITY', default=40, cast=int)
# The segment prior: "uniform" or "length".
MSVL_PRIOR = config('MSVL_PRIOR', default='uniform')
# The step between the end positions of a road's reference windows.
MSVL_REFERENCE_STRIDE = config('MSVL_REFERENCE_STRIDE', default=1, cast=int)
# The trailing records a line is fitted over to estimate the current RSS.
MSVL_RSS_SPAN = config('MSVL_RSS_SPAN', default=10, cast=int)

# Baselines.
# The side of a fingerprint cell, in meters.
BASELINES_GRID_SIZE_M = config('BASELINES_GRID_SIZE_M', default=2.0, cast=float)
# The number of neighbours of RWKNN.
BASELINES_RWKNN_K = config('BASELINES_RWKNN_K', default=3, cast=int)
# The half-width in cells of the cluster RWKNN restricts itself to.
BASELINES_RWKNN_RADIUS_CELLS = config('BASELINES_RWKNN_RADIUS_CELLS', default=2, cast=int)
# The scan step of CF-ELS, in meters.
BASELINES_CFELS_STEP_M = config('BASELINES_CFELS_STEP_M', default=0.1, cast=float)

# Benchmark.
# The scenario JSON file; empty for the default desk scenario.
BENCH_SCENARIO_FILE = config('BENCH_SCENARIO_FILE', default='')
BENCH_SEED = config('BENCH_SEED', default=0, cast=int)
BENCH_TRIALS = config('BENCH_TRIALS', default=1, cast=int)
BENCH_METHODS = config('BENCH_METHODS', default='msvl,rwknn,gift,cfels')
# The sweep axis: none, bs_count, grid_size or snr.
BENCH_SWEEP = config('BENCH_SWEEP', default='none')
BENCH_SWEEP_VALUES = config('BENCH_SWEEP_VALUES', default='')
# The target SNR of the run in dB; empty keeps the scenario noise.
BENCH_SNR_DB = config('BENCH_SNR_DB', default='')
# One fix every this many positions.
BENCH_STRIDE = config('BENCH_STRIDE', default=5, cast=int)
# The number of worker threads running trials.
BENCH_WORKERS = config('BENCH_WORKERS', default=1, cast=int)
# The maximum time in seconds that workers wait for a new trial on the queue.
BENCH_QUEUE_TIMEOUT_S = config('BENCH_QUEUE_TIMEOUT_S', default=1.0, cast=float)
# The CF-ELS step of the harness; finer steps make runs very slow.
BENCH_CFELS_STEP_M = config('BENCH_CFELS_STEP_M', default=1.0, cast=float)
BENCH_CDF_RESOLUTION = config('BENCH_CDF_RESOLUTION', default=100, cast=int)
BENCH_LATENCY_ROAD_COUNTS = config('BENCH_LATENCY_ROAD_COUNTS', default='')
BENCH_LATENCY_SEGMENT_COUNTS = config('BENCH_LATENCY_SEGMENT_COUNTS', default='')
BENCH_LATENCY_REPEATS = config('BENCH_LATENCY_REPEATS', default=100, cast=int)
BENCH_OUTPUT_DIR = config('BENCH_OUTPUT_DIR', default='bench-output')
BENCH_PROGRESS = config('BENCH_PROGRESS', default=True, cast=bool)

if "test" in sys.argv:
    print("\033[1;91mNo django tests.\033[0m")
    print("Try: \033[1;33mpy.test\033[0m")
    sys.exit(0)
