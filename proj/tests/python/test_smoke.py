"""Smoke tests for the Python module: parse / print / verify / solve round trips."""

import pytest

import gradsat

SIMPLE = """
(real x -10 10)
(assert (>= (- x 3) 0))
(assert (>= (- 4 x) 0))
"""


def test_parse_and_print_round_trip():
    p = gradsat.parse(SIMPLE)
    assert p.real_names == ["x"]
    assert p.bool_names == []
    text = str(p)
    q = gradsat.parse(text)
    assert q.real_names == ["x"]
    assert q.num_asserts == p.num_asserts


def test_parse_error():
    with pytest.raises(ValueError):
        gradsat.parse("(assert (>= (iteh y 1 2) 0))")  # y never declared


def test_verify():
    p = gradsat.parse(SIMPLE)
    assert p.verify({"reals": {"x": 3.5}})
    assert not p.verify({"reals": {"x": 9.0}})


def test_solve_simple_interval():
    p = gradsat.parse(SIMPLE)
    r = gradsat.solve(p, seed=7)
    assert r["status"] == "sat"
    assert r["verified"]
    x = r["assignment"]["reals"]["x"]
    assert 3.0 <= x <= 4.0


def test_solve_staircase_bench():
    b = gradsat.make_bench("staircase")
    r = gradsat.solve(b.program, seed=1)
    assert r["status"] == "sat"
    assert r["verified"]
    x1 = r["assignment"]["reals"]["x1"]
    assert 4.0 < x1 <= 5.0
    csv = b.trajectory_csv(r["assignment"])
    assert csv.splitlines()[0] == "step,t,a"


def test_solve_with_boolean_structure():
    text = """
    (real x -5 5)
    (bool y)
    (assert (>= (iteh y (- x 4) (- (- 0 4) x)) 0))
    (assert (>= (* x x) 9))
    """
    p = gradsat.parse(text)
    r = gradsat.solve(p, seed=3)
    assert r["status"] == "sat"
    assert r["verified"]
