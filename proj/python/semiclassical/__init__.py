"""Semiclassical potentials from Helmholtz amplitudes.

Field arrays are shaped by the grid extents (last axis fastest).
"""

import json
from pathlib import Path

from ._core import (
    ConfigError,
    DegenerateAmplitudeError,
    FieldError,
    Grid,
    GridError,
    HelmholtzPreconditionError,
    ResonanceError,
    Scenario,
    SemiclassicalError,
    construct_stationary,
    quantum_potential,
)
from . import _core

__all__ = [
    "ConfigError",
    "DegenerateAmplitudeError",
    "FieldError",
    "Grid",
    "GridError",
    "HelmholtzPreconditionError",
    "ResonanceError",
    "Scenario",
    "SemiclassicalError",
    "config_hash",
    "construct_stationary",
    "load_config",
    "quantum_potential",
    "restricted_ansatz",
    "run_cli",
    "verify",
]


def _document(config):
    if isinstance(config, dict):
        return json.dumps(config)
    if isinstance(config, Path) or not str(config).lstrip().startswith("{"):
        return Path(config).read_text()
    return str(config)


def load_config(config, overrides=()):
    """Builds a Scenario from a config path, JSON string or dict.

    overrides are `key.path=value` assignments applied before building.
    """
    return Scenario.from_config(_document(config), list(overrides))


def config_hash(config):
    return _core.config_hash(_document(config))


def verify(scenario):
    """Runs the stationary or time-dependent check suite; returns the report dict."""
    return json.loads(scenario._verify_json())


def restricted_ansatz(scenario):
    """Flux-constancy check for the one-dimensional restricted ansatz."""
    return json.loads(scenario._restricted_ansatz_json())["entries"][0]


def run_cli(*args):
    """Runs a CLI subcommand in-process; returns (exit_code, stdout, stderr)."""
    if not hasattr(_core, "run_cli"):
        raise RuntimeError("extension built without the command-line front end")
    return _core.run_cli([str(a) for a in args])
