# -*- coding: utf-8 -*-

import time


def monotonic_us():
    """Microseconds from a monotonic clock, for latency measurement."""

    return time.perf_counter_ns() / 1000.0


def elapsed_us(start_us):
    return monotonic_us() - start_us
