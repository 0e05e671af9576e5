"""Line-oriented run configuration.

Each non-blank line is ``section.key = value``; ``#`` starts a comment.
Lists are comma-separated. ``laplace.beta = auto`` selects the optimal
sampling parameter from the largest generalized eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "load_config", "SCHEMA", "REQUIRED"]

_MISSING = object()


def _int(text):
    v = float(text)
    if v != int(v):
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _floats(n):
    def parse(text):
        vals = tuple(float(p) for p in text.split(","))
        if len(vals) != n:
            raise ValueError(f"expected {n} comma-separated numbers, got {len(vals)}")
        return vals
    return parse


def _ints(text):
    vals = [_int(p) for p in text.split(",") if p.strip()]
    if not vals:
        raise ValueError("empty list")
    return vals


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text
    return parse


def _beta(text):
    return "auto" if text == "auto" else float(text)


# key -> (parser, default)
SCHEMA = {
    "mesh.n": (_int, _MISSING),
    "mesh.domain": (_floats(4), (-0.5, 0.5, -0.5, 0.5)),
    "mesh.file": (str, None),
    "physics.c": (float, 1.0),
    "ic.x0": (_floats(2), (0.25, -0.1)),
    "ic.zeta": (float, 0.05),
    "ic.u0": (_choice("gaussian", "zero"), "gaussian"),
    "ic.u1": (_choice("zero", "gaussian"), "zero"),
    "ic.u1_amplitude": (float, 1.0),
    "forcing.kind": (_choice("zero", "exp", "sin", "const"), "zero"),
    "forcing.a": (float, 0.0),
    "forcing.x0": (_floats(2), (0.0, 0.0)),
    "forcing.zeta": (float, 0.1),
    "forcing.amplitude": (float, 1.0),
    "laplace.alpha": (float, 5.0),
    "laplace.beta": (_beta, "auto"),
    "laplace.m": (_int, _MISSING),
    "laplace.power_tol": (float, 1e-6),
    "laplace.power_max_iter": (_int, 5000),
    "pod.r": (_int, _MISSING),
    "time.t_final": (float, 1.0),
    "time.n_steps": (_int, _MISSING),
    "time.gamma": (float, 0.5),
    "time.beta": (float, 0.25),
    "time.store_every": (_int, 1),
    "output.dir": (str, "out"),
    "output.write_trajectory": (_bool, True),
    "output.trajectory_every": (_int, 1),
    "online.lift": (_bool, False),
    "run.parallel_snapshots": (_bool, False),
    "compare.r_values": (_ints, _MISSING),
    "compare.m_values": (_ints, _MISSING),
}

REQUIRED = {
    "full": ("mesh.n", "time.n_steps"),
    "offline": ("mesh.n", "laplace.m", "pod.r"),
    "online": ("mesh.n", "pod.r", "time.n_steps"),
    "compare": ("mesh.n", "time.n_steps", "compare.m_values", "compare.r_values"),
    "quality": ("mesh.n",),
    "beta": ("mesh.n",),
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    source: str = "<string>"

    def __getitem__(self, key):
        if key in self.values:
            return self.values[key]
        default = SCHEMA[key][1]
        if default is _MISSING:
            raise ConfigError(f"{self.source}: missing required key '{key}'")
        return default

    def get(self, key, default=None):
        try:
            return self[key]
        except ConfigError:
            return default

    def __contains__(self, key):
        return key in self.values

    def with_values(self, **updates) -> "RunConfig":
        """Copy with overrides; keys use ``__`` for the dot (``pod__r=3``)."""
        vals = dict(self.values)
        for k, v in updates.items():
            vals[k.replace("__", ".")] = v
        return RunConfig(vals, self.source)

    def require(self, command: str) -> None:
        keys = REQUIRED[command]
        if "mesh.file" in self.values:
            keys = tuple(k for k in keys if k != "mesh.n")
        for key in keys:
            self[key]
        self.validate()

    def validate(self) -> None:
        v = self.values
        positive = ["physics.c", "ic.zeta", "laplace.alpha", "time.t_final", "laplace.power_tol", "forcing.zeta"]
        for key in positive:
            if key in v and not v[key] > 0:
                raise ConfigError(f"{self.source}: '{key}' must be positive, got {v[key]}")
        if v.get("laplace.beta", "auto") != "auto" and not v["laplace.beta"] > 0:
            raise ConfigError(f"{self.source}: 'laplace.beta' must be positive or 'auto'")
        ms = list(v.get("compare.m_values", [])) + ([v["laplace.m"]] if "laplace.m" in v else [])
        for m in ms:
            if m < 2 or m % 2:
                raise ConfigError(f"{self.source}: node count M must be even and >= 2, got {m}")
        rs = list(v.get("compare.r_values", [])) + ([v["pod.r"]] if "pod.r" in v else [])
        for r in rs:
            if r < 1:
                raise ConfigError(f"{self.source}: reduced dimension must be >= 1, got {r}")
        for key in ("mesh.n", "time.n_steps", "time.store_every", "output.trajectory_every"):
            if key in v and v[key] < 1:
                raise ConfigError(f"{self.source}: '{key}' must be >= 1, got {v[key]}")


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'section.key = value', got {raw.strip()!r}")
        key, _, value = (p.strip() for p in line.partition("="))
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        try:
            values[key] = SCHEMA[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for '{key}': {exc}") from None
    cfg = RunConfig(values, source)
    cfg.validate()
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
