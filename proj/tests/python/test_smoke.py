import json
import os
import re

import pytest

import railrecover as rr

SCENARIOS = os.environ.get(
    "RAILRECOVER_SCENARIOS", os.path.join(os.path.dirname(__file__), "..", "..", "scenarios")
)


def scenario(name):
    return rr.load_scenario(os.path.join(SCENARIOS, name + ".scenario.json"))


def test_committed_scenario_matches_fixture():
    assert scenario("mini_line") == rr.fixture("mini_line")
    assert rr.scenario_hash(scenario("mini_line")) == rr.scenario_hash(rr.fixture("mini_line"))


def test_mini_line_optimum():
    s = scenario("mini_line")
    sol = rr.solve(s, time_limit=10)
    assert sol["report"]["pass"]
    assert sol["report"]["objective"] == 2.0
    assert sol["solve"]["status"] == "optimal"
    # The solver section is part of the scenario, so the limit is hashed too.
    s["solver"]["time_limit"] = 10.0
    assert sol["scenario_hash"] == rr.scenario_hash(s)
    assert rr.verify(s, sol)["pass"]


def test_tampered_solution_fails():
    s = scenario("mini_line")
    sol = rr.solve(s)
    sol["active"] = sorted(set(sol["active"]) | {0, 2})
    assert not rr.verify(s, sol)["pass"]


def test_summary_and_diagram_agree():
    s = rr.fixture("mini_line", turn=True)
    sol = rr.solve(s)
    summary = rr.summary(s, sol)
    assert summary["objective"] == sol["report"]["objective"]
    assert summary["turns"] == 2
    svg = rr.diagram(s, sol)
    assert svg.startswith("<svg")
    assert len(re.findall(r'<polyline class="modified"', svg)) == 2


def test_penalty_changes_hash_and_outcome():
    s = rr.fixture("mini_line", turn=True)
    t = json.loads(json.dumps(s))
    t["policy"]["penalties"]["turn"] = 5.0
    assert rr.scenario_hash(s) != rr.scenario_hash(t)
    sol = rr.solve(t, extended=True)
    assert sol["report"]["turns"] == 0


def test_validation_error_has_path():
    s = rr.fixture("mini_line")
    s["policy"]["max_delay"] = 1.5
    with pytest.raises(rr.ValidationError) as err:
        rr.canonical_scenario(s)
    assert err.value.args[1] == "/policy/max_delay"
    assert isinstance(err.value, ValueError)


def test_reduction_and_lp_export():
    st = rr.stats(rr.fixture("u6_like", cycle=300, blockage=1800))
    assert st["binaries_before"] >= 2 * st["binaries_after"]
    lp = rr.export_lp(scenario("mini_line"), reduce=False)
    assert lp.startswith("\\") or "Maximize" in lp
    assert lp.rstrip().endswith("End")


def test_unknown_fixture():
    with pytest.raises(ValueError):
        rr.fixture("nowhere")
