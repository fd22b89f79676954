"""Rail disruption recovery.

Thin wrappers over the compiled core: scenarios and solutions are plain
dicts in the documented JSON formats.
"""

import json

from . import _railrecover as _core
from ._railrecover import ValidationError, schema_version

__all__ = [
    "ValidationError",
    "canonical_scenario",
    "diagram",
    "export_lp",
    "fixture",
    "load_scenario",
    "scenario_hash",
    "schema_version",
    "solve",
    "stats",
    "summary",
    "verify",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def load_scenario(path):
    with open(path, encoding="utf-8") as f:
        return canonical_scenario(f.read())


def canonical_scenario(scenario):
    return json.loads(_core.canonical_scenario(_text(scenario)))


def scenario_hash(scenario):
    return _core.scenario_hash(_text(scenario))


def fixture(name, **params):
    return json.loads(_core.fixture(name, **params))


def solve(scenario, time_limit=None, reduce=True, extended=None):
    return json.loads(_core.solve(_text(scenario), time_limit=time_limit, reduce=reduce, extended=extended))


def verify(scenario, solution):
    return json.loads(_core.verify(_text(scenario), _text(solution)))


def summary(scenario, solution):
    return json.loads(_core.summary(_text(scenario), _text(solution)))


def diagram(scenario, solution):
    return _core.diagram(_text(scenario), _text(solution))


def export_lp(scenario, reduce=True):
    return _core.export_lp(_text(scenario), reduce=reduce)


def stats(scenario):
    return json.loads(_core.stats(_text(scenario)))
