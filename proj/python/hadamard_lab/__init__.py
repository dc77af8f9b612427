"""Property checks for CAT(0) model spaces."""

import json

from ._core import (
    ConstructionError,
    DomainError,
    PreconditionError,
    SchemaError,
    Space,
    __version__,
    barycenter,
    check_cn,
    check_reshetnyak,
    circumcenter,
    euclidean,
    fuzz_json,
    hyperbolic,
    product,
    run_scenario_json,
    spd,
    tree,
)


def run_scenario(scenario, seed=None, trials=None):
    """Run a scenario given as a dict or JSON text; returns the report dict."""
    text = scenario if isinstance(scenario, str) else json.dumps(scenario)
    return json.loads(run_scenario_json(text, seed, trials))


def fuzz(spaces=(), trials=100, seed=0):
    return json.loads(fuzz_json(list(spaces), trials, seed))
