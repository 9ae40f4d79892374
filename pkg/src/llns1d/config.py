"""Flat key=value experiment configuration with dotted section names.

The on-disk format is one `key = value` per line, `#` comments, blank lines
ignored.  Keys use dots for grouping (grid.M_c, bc.T_left); values are
parsed as int when possible, then float, then kept as strings.  Parsing and
serialization round-trip exactly at the dataclass level.
"""
from dataclasses import dataclass, fields, replace

from llns1d.gas import GasSpec, GridSpec
from llns1d.kinds import SchemeKind

EXPERIMENT_KINDS = ("equilibrium", "equilibrium_walls", "time_correlation",
                    "gradient", "shock")
ENGINES = ("pde", "dsmc")

_ARGON = GasSpec.argon()


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "equilibrium"
    engine: str = "pde"
    scheme: str = "rk3"
    seed: int = 0
    ensemble: int = 1
    steps: int = 100_000
    warmup: int = 20_000
    sample_every: int = 1
    grid_M_c: int = 40
    grid_L: float = 1.25e-4
    grid_sigma: float = 1.568e-12
    gas_m: float = _ARGON.m
    gas_d: float = _ARGON.d
    gas_gamma: float = _ARGON.gamma
    state_rho: float = 1.78e-3
    state_T: float = 273.0
    state_u: float = 0.0
    dt: float = 1e-12        # seconds; 0 means derive from stability
    dt_safety: float = 0.2   # fraction of the stability bound when derived
    bc_kind: str = "periodic"
    T_left: float = 273.0
    T_right: float = 273.0
    mode_n: int = 1
    max_lag: int = 4000
    lag_stride: int = 50
    mach: float = 2.0
    fit_lo: float = 0.2      # shock fit window, fractions of the final time
    fit_hi: float = 0.9
    output: str = "runs/out"

    def validate(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        SchemeKind.parse(self.scheme)
        if self.ensemble < 1:
            raise ValueError("ensemble size must be at least 1")
        if self.steps < 1 or self.warmup < 0 or self.sample_every < 1:
            raise ValueError("steps, warmup, and sample_every must be sane")
        if self.grid_M_c < 2 or self.grid_L <= 0 or self.grid_sigma <= 0:
            raise ValueError("grid parameters must be positive")
        if self.state_rho <= 0 or self.state_T <= 0:
            raise ValueError("reference state must be physical")
        if self.dt < 0:
            raise ValueError("dt must be positive or 0 for automatic")
        if not 0 < self.dt_safety <= 1:
            raise ValueError("dt safety factor must lie in (0, 1]")
        if self.kind == "gradient" and not (self.T_left > 0
                                            and self.T_right > 0):
            raise ValueError("gradient wall temperatures must be positive")
        if self.kind == "shock" and self.mach <= 1:
            raise ValueError("shock Mach number must exceed 1")
        if not 0 <= self.fit_lo < self.fit_hi <= 1:
            raise ValueError("fit window fractions must be ordered in [0,1]")
        return self

    # -- builders ---------------------------------------------------------

    def gas(self) -> GasSpec:
        return GasSpec.hard_sphere(self.gas_m, self.gas_d,
                                   gamma=self.gas_gamma)

    def grid(self) -> GridSpec:
        return GridSpec(M_c=self.grid_M_c, L=self.grid_L,
                        sigma=self.grid_sigma)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


# canonical file keys <-> dataclass fields
_KEYMAP = {
    "kind": "kind",
    "engine": "engine",
    "scheme": "scheme",
    "seed": "seed",
    "ensemble": "ensemble",
    "steps": "steps",
    "warmup": "warmup",
    "sample_every": "sample_every",
    "grid.M_c": "grid_M_c",
    "grid.L": "grid_L",
    "grid.sigma": "grid_sigma",
    "gas.m": "gas_m",
    "gas.d": "gas_d",
    "gas.gamma": "gas_gamma",
    "state.rho": "state_rho",
    "state.T": "state_T",
    "state.u": "state_u",
    "dt": "dt",
    "dt.safety": "dt_safety",
    "bc.kind": "bc_kind",
    "bc.T_left": "T_left",
    "bc.T_right": "T_right",
    "corr.mode_n": "mode_n",
    "corr.max_lag": "max_lag",
    "corr.lag_stride": "lag_stride",
    "shock.mach": "mach",
    "shock.fit_lo": "fit_lo",
    "shock.fit_hi": "fit_hi",
    "output": "output",
}
_FIELDMAP = {v: k for k, v in _KEYMAP.items()}
_FIELD_TYPES = {
    f.name: (f.type if isinstance(f.type, str) else f.type.__name__)
    for f in fields(ExperimentConfig)
}


def _parse_value(field_name: str, raw: str):
    ftype = _FIELD_TYPES[field_name]
    if field_name == "dt" and raw == "auto":
        return 0.0
    if ftype == "int":
        return int(raw)
    if ftype == "float":
        return float(raw)
    return raw


def _format_value(field_name: str, value):
    if field_name == "dt" and value == 0.0:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _KEYMAP:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        field = _KEYMAP[key]
        try:
            values[field] = _parse_value(field, raw)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}")
    return ExperimentConfig(**values).validate()


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key in _KEYMAP:
        field = _KEYMAP[key]
        lines.append(f"{key} = {_format_value(field, getattr(cfg, field))}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
