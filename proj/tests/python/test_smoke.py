import math

import pytest

import ftkn

TINY = {
    "model.dim": 16,
    "model.heads": 2,
    "sampling.focal": 8,
    "fusion.T": 4,
    "fusion.G": 2,
    "scene.train_scenes": 4,
    "scene.eval_scenes": 2,
    "scene.max_objects": 3,
    "train.epochs": 1,
}


def test_config_presets():
    full = ftkn.config("full")
    assert full["model"]["dim"] == 256
    assert full["fusion"]["T"] == 16
    assert ftkn.config("desk", {"scaling.scorer": "random"})["scaling"]["scorer"] == "random"
    with pytest.raises(ValueError):
        ftkn.config("desk", {"no.such.key": 1})


def test_iou():
    box = [0, 0, 0, 4, 2, 1.5, 0.3]
    assert ftkn.iou_bev(box, box) == pytest.approx(1.0)
    shifted = [1, 0, 0, 2, 2, 1.5, 0]
    assert ftkn.iou_bev([0, 0, 0, 2, 2, 1.5, 0], shifted) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        ftkn.iou_bev([0, 0, 0], box)


def test_supervised_score():
    assert ftkn.supervised_score(0.7) == 1.0
    assert ftkn.supervised_score(1.3) == 0.0
    assert ftkn.supervised_score(1.1) == pytest.approx(0.25)


def test_grouping_and_trace():
    assert ftkn.group_split(16, 4) == [[0, 4, 8, 12], [1, 5, 9, 13], [2, 6, 10, 14], [3, 7, 11, 15]]
    assert ftkn.fusion_trace() == [(16, 24), (4, 96), (4, 48), (1, 192), (1, 48)]


def test_dedup():
    assert ftkn.unique_point_count([[1, 2, 3], [3, 4, -1], []]) == 4


def test_scene():
    frames = ftkn.generate_scene(seed=3, settings=TINY)
    assert len(frames) == 4
    assert all(len(p) == 4 for p in frames[0]["points"])
    assert frames[0]["boxes"]
    again = ftkn.generate_scene(seed=3, settings=TINY)
    assert frames == again


def test_attention_cells_drop_with_scaling():
    assert 2 * ftkn.analytic_attention_cells() <= ftkn.analytic_attention_cells(no_scaling=True)


def test_infer_and_train():
    first = ftkn.infer(settings=TINY)
    assert first == ftkn.infer(settings=TINY)
    assert first["matched"] > 0
    trained = ftkn.train_and_evaluate(settings=TINY)
    assert math.isfinite(trained["iou_after"])
