import json
import os

import pytest

import weftsched

DATA = os.path.join(os.path.dirname(__file__), "..", "..", "data")


def fixture(name):
    with open(os.path.join(DATA, name)) as f:
        return f.read()


@pytest.fixture(scope="module")
def attention():
    return fixture("attention_simple.json")


def test_schedule_pins_the_attention_pipeline(attention):
    r = weftsched.schedule(attention, ii=2)
    assert r["status"] == "feasible"
    assert r["I"] == 2 and r["L"] == 4
    assert r["M"] == {"S": 0, "P": 2, "O": 3}
    assert r["modular_rrt"]["TC"] == [1, 1]
    assert r["straightline"]["copies"] == 2


def test_infeasible_interval_is_reported(attention):
    r = weftsched.schedule(attention, ii=1)
    assert r == {"status": "infeasible", "I": 1}


def test_joint_search_round_trips(attention):
    r = weftsched.joint(attention)
    assert r["status"] == "sat"
    assert r["I"] == 2 and r["L"] == 4
    assert r["A"] == {"S": 0, "P": 0, "O": 0}
    assert [a["outcome"] for a in r["search_report"]] == [
        "no_modulo_schedule",
        "sat",
    ]

    sol = r["solution_json"]
    json.loads(sol)  # well-formed interchange document

    listing = weftsched.codegen(attention, sol)
    assert "S = Sn" in listing
    assert "O[i-1]" in listing

    assert weftsched.validate(attention, sol) == []

    sim = weftsched.simulate(attention, sol, iterations=8)
    assert sim["steady"] == (1, 2)


def test_inorder_baseline_rate(attention):
    sim = weftsched.simulate(attention, iterations=8)
    assert sim["throughput"] == (1, 3)
    assert sim["cycles"] == 24


def test_normalize_reduces_costs():
    problem = fixture("attention_simple.json")
    r = weftsched.normalize(problem, resolution=10)
    assert r["F"] == 0
    assert r["cost_map"] == {1: 1}
    json.loads(r["problem"])


def test_renderings(attention):
    assert weftsched.dot(attention).startswith("digraph deps {")
    sol = weftsched.joint(attention)["solution_json"]
    svg = weftsched.gantt(attention, sol)
    assert svg.startswith("<svg xmlns")
    assert "stroke-dasharray" in svg


def test_bad_solution_is_rejected(attention):
    with pytest.raises(ValueError):
        weftsched.validate(attention, "{\"I\": 0}")
