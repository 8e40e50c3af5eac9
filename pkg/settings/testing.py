# -*- coding: utf-8 -*-

from .development import *

ROADAWARE_LOG_FILE = "/tmp/roadaware-tests.log"

LOGGING["loggers"]["roadaware"]["level"] = "WARNING"

# Small defaults keep the end to end tests fast.
BENCH_PROGRESS = False
BENCH_STRIDE = 20
BENCH_METHODS = "msvl,rwknn,gift"
BENCH_OUTPUT_DIR = "/tmp/roadaware-bench"

INSTALLED_APPS = INSTALLED_APPS + [
    "tests",
]
