"""Run configuration: a flat key = value text format.

One key per line, `#` starts a comment, blank lines ignored.  Unknown keys
are rejected so typos fail loudly.  format_config round-trips losslessly
through parse_config.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .cases import get_case
from .recon import MODE_CODES

SOLVERS = ("gks_s2o4", "lf_ssprk3")
FORMATS = ("csv", "vtk")

_INT_KEYS = frozenset({"nx", "ny", "max_steps", "snapshot_every"})
_FLOAT_KEYS = frozenset(
    {"cfl", "t_end", "alpha_thres", "d_h", "d_l", "gamma",
     "p0", "v0", "p_side"})
_STR_KEYS = frozenset({"case", "solver", "recon", "out_dir", "format"})
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


@dataclass
class RunConfig:
    """One solver invocation.  Unset numeric fields fall back to the
    case defaults at run time."""

    case: str
    solver: str = "gks_s2o4"
    recon: str = "hybrid"
    nx: int | None = None
    ny: int | None = None
    cfl: float | None = None
    t_end: float | None = None
    max_steps: int | None = None
    alpha_thres: float = 0.5
    d_h: float = 0.85
    d_l: float = 0.85
    gamma: float = 1.4
    p0: float | None = None
    v0: float | None = None
    p_side: float | None = None
    out_dir: str = "."
    format: str = "csv"
    snapshot_every: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        get_case(self.case)
        if self.solver not in SOLVERS:
            raise ValueError(
                f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.recon not in MODE_CODES:
            raise ValueError(
                f"unknown recon {self.recon!r}; "
                f"choose from {tuple(MODE_CODES)}")
        for token in self.format_tokens():
            if token not in FORMATS:
                raise ValueError(
                    f"unknown output format {token!r}; choose from {FORMATS}")
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        for key in ("nx", "ny"):
            value = getattr(self, key)
            if value is not None and value < 6:
                raise ValueError(f"{key} must be at least 6, got {value}")
        for key in ("cfl", "t_end", "p0", "v0", "p_side"):
            value = getattr(self, key)
            if value is not None and value <= 0.0:
                raise ValueError(f"{key} must be positive, got {value}")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError(f"max_steps must be >= 0, got {self.max_steps}")
        if self.snapshot_every < 0:
            raise ValueError(
                f"snapshot_every must be >= 0, got {self.snapshot_every}")
        if not 0.0 <= self.alpha_thres <= 1.0:
            raise ValueError(
                f"alpha_thres must lie in [0, 1], got {self.alpha_thres}")
        for key in ("d_h", "d_l"):
            value = getattr(self, key)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{key} must lie in (0, 1), got {value}")

    def format_tokens(self) -> tuple[str, ...]:
        if not self.format:
            return ()
        return tuple(t.strip() for t in self.format.split(",") if t.strip())

    def flux_name(self) -> str:
        return "gks" if self.solver == "gks_s2o4" else "lf"

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def parse_config(text: str) -> RunConfig:
    """Parse flat key = value text into a RunConfig."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _ALL_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        else:
            values[key] = val
    if "case" not in values:
        raise ValueError("config must set `case`")
    return RunConfig(**values)


def format_config(config: RunConfig) -> str:
    """Serialize a RunConfig so that parse_config reproduces it exactly."""
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            continue
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
