import json
from pathlib import Path

import numpy as np
import pytest

import semiclassical as sc

CONFIGS = Path(__file__).resolve().parents[2] / "configs"
HEADLINE = CONFIGS / "headline.json"


def test_headline_potential_matches_closed_form():
    s = sc.load_config(HEADLINE)
    x = s.grid.coordinates(0)
    assert s.amplitude().shape == (512,)
    inner = slice(2, -2)
    expected = -0.5 * (1.0 + 0.25 / np.cos(x) ** 4)
    assert np.max(np.abs(s.potential()[inner] - expected[inner])) < 1e-3
    assert s.quantum_constant() == pytest.approx(0.5)
    q = s.quantum_potential()
    assert np.max(np.abs(q[inner] - 0.5)) < 1e-4


def test_headline_verifies():
    report = sc.verify(sc.load_config(HEADLINE))
    assert report["entries"]
    assert all(e["status"] == "pass" for e in report["entries"])


def test_overrides_and_hash():
    doc = json.loads(HEADLINE.read_text())
    assert sc.config_hash(doc) == sc.config_hash(json.dumps(doc, indent=4, sort_keys=True))
    s = sc.load_config(doc, ["E=2.0"])
    assert s.energy == 2.0
    with pytest.raises(sc.ConfigError):
        sc.load_config(doc, ["no_such_key=1"])


def test_quantum_potential_of_plane_wave():
    g = sc.Grid([64], [0.0], [2 * np.pi / 64], "periodic")
    x = g.coordinates(0)
    h = g.spacing[0]
    q, mask = sc.quantum_potential(g, np.cos(x) + 2.0)
    assert not mask.any()
    symbol = 2.0 * (1.0 - np.cos(h)) / h**2
    assert np.allclose(q, 0.5 * symbol * np.cos(x) / (np.cos(x) + 2.0), atol=1e-12)


def test_construct_stationary_and_gauge(tmp_path):
    g = sc.Grid([129], [-1.0], [2.0 / 128])
    x = g.coordinates(0)
    R = np.cos(x)
    s = sc.construct_stationary(g, R, 0.3 * np.sin(x), E=0.0, lam=1.0)
    assert sc.restricted_ansatz(s)["status"] == "pass"
    shifted = s.gauge_shifted(1.0)
    k = s.quantum_constant()
    assert np.max(np.abs(shifted.potential() - s.potential() - k)) < 1e-12
    s.save(tmp_path / "scn")
    back = sc.Scenario.load(tmp_path / "scn")
    assert np.array_equal(back.potential(), s.potential())


def test_precondition_error_names_field():
    g = sc.Grid([129], [-1.0], [2.0 / 128])
    x = g.coordinates(0)
    with pytest.raises(sc.HelmholtzPreconditionError, match="R"):
        sc.construct_stationary(g, np.cos(x) + 0.3 * x**2, 0.3 * np.sin(x), E=0.0, lam=1.0)


def test_shape_mismatch_raises():
    g = sc.Grid([16, 16], [0.0, 0.0], [0.1, 0.1])
    with pytest.raises(sc.FieldError):
        sc.quantum_potential(g, np.ones(10))


def test_run_cli(tmp_path):
    out = tmp_path / "headline"
    code, _, _ = sc.run_cli("generate", "--config", HEADLINE, "--out", out)
    assert code == 0
    code, stdout, _ = sc.run_cli("verify", out)
    assert code == 0
    code, _, _ = sc.run_cli("verify", tmp_path / "missing")
    assert code == 2
