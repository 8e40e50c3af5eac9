# -*- coding: utf-8 -*-

import math

import simplejson


def dumps(data, indent=2):
    """Serializes deterministically: sorted keys, shortest round-trip floats
    and NaN as null."""

    return simplejson.dumps(data, indent=indent, sort_keys=True,
                            ignore_nan=True) + "\n"


def loads(data):
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return simplejson.loads(data)


def dump_file(data, file_path):
    with open(file_path, "w", encoding="utf-8", newline="\n") as output:
        output.write(dumps(data))


def load_file(file_path):
    with open(file_path, "r", encoding="utf-8") as source:
        return loads(source.read())


def nan_to_none(values):
    return [None if value is None or math.isnan(value) else float(value)
            for value in values]


def none_to_nan(values):
    return [math.nan if value is None else float(value) for value in values]
