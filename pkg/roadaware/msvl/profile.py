# -*- coding: utf-8 -*-
"""
Reading and writing road profile databases as versioned JSON documents.

Masks are stored as bit strings and missing feature values as null.
"""

from os import path

import numpy as np

from roadaware.base.exceptions import ParseError
from roadaware.base.exceptions import ProfileError
from roadaware.base.exceptions import RoadawareError
from roadaware.base.utils import json
from roadaware.curvefit.entities import FittedCurve
from roadaware.features.entities import NormalizationParams
from roadaware.features.entities import SelectionMask
from roadaware.segmentation.entities import SegmentationConfig

from .entities import PROFILE_SCHEMA
from .entities import ReferenceWindows
from .entities import RoadEntry
from .entities import RoadProfileDB
from .entities import SegmentEntry


def _floats(values):
    return json.nan_to_none(np.asarray(values, dtype=float).tolist())


def _array(values):
    return np.array(json.none_to_nan(values), dtype=float)


def _normalization_to_dict(params):
    return {"mean": _floats(params.mean), "std": _floats(params.std)}


def _normalization_from_dict(data):
    return NormalizationParams(mean=_array(data["mean"]), std=_array(data["std"]))


def _references_to_dict(references):
    return {
        "ends": [int(end) for end in references.ends],
        "features": [_floats(row) for row in references.features],
    }


def _references_from_dict(data):
    features = np.array([_array(row) for row in data["features"]], dtype=float)
    return ReferenceWindows(ends=[int(end) for end in data["ends"]], features=features)


def _curve_to_dict(curve):
    return {
        "bs_index": curve.bs_index,
        "order": curve.order,
        "theta": _floats(curve.theta),
        "alpha": _floats(curve.alpha),
        "fit_residual": curve.fit_residual,
        "bounds": list(curve.bounds) if curve.bounds is not None else None,
    }


def _curve_from_dict(data, scope):
    return FittedCurve(scope=tuple(scope) + (data["bs_index"],),
                       bs_index=int(data["bs_index"]), order=int(data["order"]),
                       theta=_array(data["theta"]), alpha=_array(data["alpha"]),
                       fit_residual=float(data["fit_residual"]),
                       bounds=data.get("bounds"))


def _segment_to_dict(segment):
    return {
        "segment_id": segment.segment_id,
        "start": segment.start,
        "end": segment.end,
        "prior": segment.prior,
        "midpoint": list(segment.midpoint),
        "mask": segment.mask.bits,
        "curves": [_curve_to_dict(curve) for curve in segment.curves],
    }


def _segment_from_dict(data, road_id):
    scope = (road_id, int(data["segment_id"]))
    mask = SelectionMask.from_bits(data["mask"])
    return SegmentEntry(segment_id=scope[1], start=int(data["start"]),
                        end=int(data["end"]), mask=mask,
                        curves=tuple(_curve_from_dict(curve, scope)
                                     for curve in data["curves"]),
                        prior=float(data["prior"]),
                        midpoint=tuple(float(v) for v in data["midpoint"]))


def db_to_dict(db):
    return {
        "schema": db.schema,
        "scenario_digest": db.scenario_digest,
        "num_base_stations": db.num_base_stations,
        "sample_interval_m": db.sample_interval_m,
        "window_len": db.window_len,
        "segmentation": {
            "tau": db.segmentation.tau,
            "min_segment_len": db.segmentation.min_segment_len,
            "penalty": db.segmentation.penalty,
        },
        "roads": [{
            "road_id": road.road_id,
            "penalty": road.penalty,
            "mask": road.mask.bits,
            "references": _references_to_dict(road.references),
            "normalization": _normalization_to_dict(road.normalization),
            "segment_normalization": _normalization_to_dict(road.segment_normalization),
            "segments": [_segment_to_dict(segment) for segment in road.segments],
        } for road in db.roads],
    }


def db_from_dict(data):
    if not isinstance(data, dict):
        raise ProfileError("A profile is a JSON object")
    schema = data.get("schema")
    if schema != PROFILE_SCHEMA:
        raise ProfileError("Unsupported profile schema: %r" % schema)
    try:
        roads = []
        for road in data["roads"]:
            road_id = int(road["road_id"])
            mask = SelectionMask.from_bits(road["mask"])
            roads.append(RoadEntry(
                road_id=road_id, mask=mask,
                references=_references_from_dict(road["references"]),
                normalization=_normalization_from_dict(road["normalization"]),
                segment_normalization=_normalization_from_dict(
                    road["segment_normalization"]),
                segments=tuple(_segment_from_dict(segment, road_id)
                               for segment in road["segments"]),
                penalty=road.get("penalty")))
        segmentation = data["segmentation"]
        return RoadProfileDB(
            scenario_digest=str(data["scenario_digest"]),
            num_base_stations=int(data["num_base_stations"]),
            sample_interval_m=float(data["sample_interval_m"]),
            window_len=int(data["window_len"]),
            segmentation=SegmentationConfig(
                tau=float(segmentation["tau"]),
                min_segment_len=int(segmentation["min_segment_len"]),
                penalty=segmentation.get("penalty")),
            roads=tuple(roads), schema=schema)
    except RoadawareError as error:
        raise ProfileError("Invalid profile: %s" % error)
    except (KeyError, TypeError, ValueError) as error:
        raise ProfileError("Invalid profile, bad or missing field: %s" % error)


def save_profile(db, file_path):
    json.dump_file(db_to_dict(db), file_path)


def load_profile(file_path):
    if not path.isfile(file_path):
        raise ProfileError("Profile not found: %s" % file_path)
    try:
        data = json.load_file(file_path)
    except ValueError as error:
        raise ParseError("%s: %s" % (file_path, error))
    return db_from_dict(data)
