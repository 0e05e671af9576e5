import pytest

from ltrb import ConfigError
from ltrb.config import SCHEMA, load_config, parse_config

GOOD = """
# desk run
mesh.n = 16
physics.c = 1.0
laplace.m = 200        # even
laplace.beta = auto
pod.r = 40
time.n_steps = 2000
compare.r_values = 1, 5,10
compare.m_values = 100,200
ic.x0 = 0.25, -0.1
output.write_trajectory = no
"""


def test_parses_values_and_defaults():
    cfg = parse_config(GOOD, "desk.cfg")
    assert cfg["mesh.n"] == 16 and cfg["laplace.m"] == 200 and cfg["laplace.beta"] == "auto"
    assert cfg["compare.r_values"] == [1, 5, 10]
    assert cfg["ic.x0"] == (0.25, -0.1)
    assert cfg["output.write_trajectory"] is False
    assert cfg["laplace.alpha"] == 5.0 and cfg["ic.zeta"] == 0.05 and cfg["time.t_final"] == 1.0
    assert cfg["laplace.power_tol"] == 1e-6 and cfg["laplace.power_max_iter"] == 5000
    assert cfg["time.gamma"] == 0.5 and cfg["time.beta"] == 0.25
    for cmd in ("full", "offline", "online", "compare", "quality", "beta"):
        cfg.require(cmd)


def test_missing_required_key_names_it():
    cfg = parse_config("mesh.n = 8\n", "x.cfg")
    with pytest.raises(ConfigError, match="time.n_steps"):
        cfg.require("full")
    with pytest.raises(ConfigError, match="laplace.m"):
        cfg.require("offline")


@pytest.mark.parametrize("text,where,what", [
    ("mesh.n = 8\nmesh.q = 3\n", ":2", "unknown key 'mesh.q'"),
    ("mesh.n = 8\nmesh.n = 9\n", ":2", "duplicate"),
    ("mesh.n = eight\n", ":1", "bad value"),
    ("mesh.n = 8.5\n", ":1", "integer"),
    ("\n\nmesh.n\n", ":3", "section.key = value"),
    ("ic.x0 = 1\n", ":1", "2 comma-separated"),
    ("forcing.kind = cosh\n", ":1", "expected one of"),
])
def test_line_diagnostics(text, where, what):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, "run.cfg")
    assert f"run.cfg{where}" in str(exc.value) and what in str(exc.value)


@pytest.mark.parametrize("line", ["laplace.m = 7", "compare.m_values = 100, 101", "pod.r = 0", "physics.c = -1",
                                  "ic.zeta = 0", "laplace.beta = -3", "mesh.n = 0", "time.n_steps = 0"])
def test_validation(line):
    with pytest.raises(ConfigError):
        parse_config(line + "\n")


def test_overrides_and_file(tmp_path):
    path = tmp_path / "a.cfg"
    path.write_text(GOOD)
    cfg = load_config(path).with_values(output__dir="elsewhere", pod__r=3)
    assert cfg["output.dir"] == "elsewhere" and cfg["pod.r"] == 3
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_every_schema_key_has_a_parser():
    assert all(callable(parser) for parser, _ in SCHEMA.values())
