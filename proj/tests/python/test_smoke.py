from fractions import Fraction
import json

import pytest

import memnet


POINTS = [[0, 0], [3, 1], ["1/2", 4], [-2, "2.5"], [5, -1]]
LABELS = [1, 3, 2, 2, 1]


def test_build_and_evaluate():
    out = memnet.build(POINTS, LABELS, seed=1)
    assert out["pass"]
    assert out["report"]["memorized"]
    assert memnet.evaluate(out["net"], POINTS) == [Fraction(y) for y in LABELS]
    assert memnet.metrics(out["net"])["width"] <= 12
    assert json.loads(out["net"])["schema"] == "memnet.net"


def test_verify_detects_wrong_labels():
    net = memnet.build(POINTS, LABELS)["net"]
    assert memnet.verify(net, POINTS, LABELS)["memorized"]
    assert not memnet.verify(net, POINTS, [2, 3, 2, 2, 1])["memorized"]


def test_variants():
    for kw in ({"mode": "depth", "L": 2}, {"mode": "bits", "B": 2}):
        assert memnet.build(POINTS, LABELS, **kw)["pass"]
    reg = memnet.build(POINTS, [0.1, 0.9, 0.5, 0.33, 0.0], mode="regression", epsilon="1/4")
    assert reg["pass"]


def test_deterministic():
    assert memnet.build(POINTS, LABELS, seed=4)["net"] == memnet.build(POINTS, LABELS, seed=4)["net"]


def test_errors():
    with pytest.raises(memnet.MemnetError):
        memnet.build([[1, 1], [1, 1]], [1, 2])
    with pytest.raises(memnet.MemnetError):
        memnet.build(POINTS, [0.1, 0.9, 0.5, 0.33, 0.0], mode="regression", epsilon=0.1)


def test_oracle_and_cli():
    assert memnet.oracle("bits", 4)["pass"]
    code, out, _ = memnet.cli("oracle", "triangle", "--n-max", "3")
    assert code == 0 and json.loads(out)["pass"]
    assert memnet.cli("build", "--in", "/nonexistent.csv")[0] == 2
