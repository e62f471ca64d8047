import json

import pytest

from fracplast.config import OUTPUT_ROOT_ENV, RunConfig, parse_config
from fracplast.solver import ConfigurationError


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


def test_minimal_config_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv(OUTPUT_ROOT_ENV, raising=False)
    cfg = parse_config(write(tmp_path, {"alpha": 0.5, "ell_fraction": 0.1, "m": 2}))
    assert cfg.E == 205e9 and cfg.sigma_Y == 1.2e9
    assert cfg.l == 1.0 and cfg.u_bar_fraction == 0.003 and cfg.n_steps == 100
    assert cfg.n_intervals == 20
    assert cfg.dx == pytest.approx(0.05)
    assert cfg.output == "out"


def test_alpha_out_of_range(tmp_path):
    with pytest.raises(ConfigurationError, match=r"alpha must lie in \(0,1\]"):
        parse_config(write(tmp_path, {"alpha": 1.2, "ell_fraction": 0.1}))
    with pytest.raises(ConfigurationError, match=r"alpha must lie in \(0,1\]"):
        RunConfig(alpha=0.0, ell_fraction=0.1)


def test_distinct_diagnostics(tmp_path):
    msgs = []
    for bad in (
        lambda: parse_config(tmp_path / "missing.json"),
        lambda: parse_config(write(tmp_path, {"alpha": 0.5, "ell_fraction": 0.1, "colour": 1})),
        lambda: parse_config(write(tmp_path, {"alpha": 0.5, "ell_fraction": 0.3, "m": 4})),
        lambda: parse_config(write(tmp_path, "{not json")),
        lambda: parse_config(write(tmp_path, {"alpha": 0.5})),
    ):
        with pytest.raises(ConfigurationError) as info:
            bad()
        msgs.append(str(info.value))
    assert "not found" in msgs[0]
    assert "unknown config key" in msgs[1] and "colour" in msgs[1]
    assert "dx = ell/m" in msgs[2]
    assert "JSON" in msgs[3]
    assert "ell_fraction" in msgs[4]
    assert len(set(msgs)) == 5


def test_overrides_win(tmp_path):
    p = write(tmp_path, {"alpha": 0.5, "ell_fraction": 0.1, "n_steps": 10})
    cfg = parse_config(p, {"alpha": 0.9, "n_steps": None, "m": "4"})
    assert cfg.alpha == 0.9 and cfg.n_steps == 10 and cfg.m == 4
    assert parse_config(None, {"alpha": 1.0, "ell_fraction": 0.2}).n_intervals == 10


def test_non_integer_m_rejected():
    with pytest.raises(ConfigurationError, match="integer"):
        parse_config(None, {"alpha": 1.0, "ell_fraction": 0.2, "m": 2.5})


def test_output_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "root"))
    p = write(tmp_path, {"alpha": 0.5, "ell_fraction": 0.1})
    assert parse_config(p).output == str(tmp_path / "root")
    assert parse_config(p, {"output": "explicit"}).output == "explicit"


def test_header_echoes_baseline():
    text = "\n".join(RunConfig(alpha=1.0, ell_fraction=0.04).header_lines())
    assert "l = 1 m" in text
    assert "E = 205 GPa" in text and "sigma_Y = 1200 MPa" in text
    assert "U = 0.003 l" in text and "b = 615 MN/m^3" in text


def test_body_force_table_roundtrip(tmp_path):
    table = [[0.0, 1.0], [1.0, 1.0]]
    cfg = parse_config(None, {"alpha": 1.0, "ell_fraction": 0.2, "body_force_profile": "table", "body_force_table": table})
    assert cfg.to_dict()["body_force_table"] == table
    assert cfg.body_force_values() == pytest.approx([615e6] * 11)
