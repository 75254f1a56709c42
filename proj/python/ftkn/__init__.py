"""Python front end for the ftkn C++ core.

Settings are plain dicts of dotted or nested keys, e.g. ``{"scaling.scorer": "random"}``.
"""

import json

from . import _core
from ._core import ConfigError, DimensionError, group_split, iou_bev, supervised_score, unique_point_count

__all__ = [
    "ConfigError",
    "DimensionError",
    "analytic_attention_cells",
    "bench",
    "config",
    "fusion_trace",
    "generate_scene",
    "group_split",
    "infer",
    "iou_bev",
    "supervised_score",
    "train_and_evaluate",
    "unique_point_count",
]


def _dump(settings):
    return json.dumps(settings) if settings else ""


def config(preset="desk", settings=None):
    return json.loads(_core.config_json(preset, _dump(settings)))


def fusion_trace(preset="full", settings=None):
    return _core.fusion_trace(preset, _dump(settings))


def generate_scene(seed=0, preset="desk", settings=None):
    return _core.generate_scene(preset, _dump(settings), seed)


def analytic_attention_cells(preset="full", settings=None, no_scaling=False):
    return _core.analytic_attention_cells(preset, _dump(settings), no_scaling)


def infer(preset="desk", settings=None):
    return _core.infer(preset, _dump(settings))


def train_and_evaluate(preset="desk", settings=None):
    return _core.train_and_evaluate(preset, _dump(settings))


def bench(preset="full", settings=None, objects=1):
    return _core.bench(preset, _dump(settings), objects)
