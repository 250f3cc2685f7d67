"""Experiment configuration and its flat ``key = value`` file format.

Example::

    # single-user SER run
    kind = ser_vs_snr
    k_users = 1
    m_antennas = 128
    n_side = 4
    power = 1.0
    snr_db = -12:4:1          # start:stop:step, inclusive
    schemes = inf_total, onebit:m2=8, onebit:m2=8:range=1.0
    trials = 1000
    symbols_per_channel = 200
    master_seed = 1

Lists are comma separated; numeric lists also accept ``start:stop:step``.
Unknown keys are rejected.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
import math
from pathlib import Path

from ..errors import InvalidParameterError
from ..precoding import DEFAULT_M2, MAX_M2, ORACLE_MAX_M

__all__ = ["ConfigError", "SchemeSpec", "ExperimentConfig", "parse_scheme", "load_config", "parse_config_text"]

KINDS = ("mse_sweep", "ser_vs_snr", "ser_vs_antennas", "precode_once")
SCHEME_KINDS = ("inf_total", "inf_per_antenna", "zf", "onebit", "quantized_zf", "oracle")
SINGLE_USER_ONLY = ("inf_total", "inf_per_antenna")


class ConfigError(InvalidParameterError):
    pass


@dataclass(frozen=True)
class SchemeSpec:
    """One transmit scheme in a sweep.

    ``range_factor`` multiplies the reference range (``sqrt(2P) ||h||_2`` for
    one user, ``sqrt(2PM / f(K, N))`` otherwise). ``None`` selects the
    scheme's own rule: 1 for ``inf_total``/``zf``, the exact per-antenna
    range for ``inf_per_antenna`` and ``sqrt(2/pi)`` for the one-bit schemes.
    """

    kind: str
    m2: int = DEFAULT_M2
    range_factor: float | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ConfigError(f"unknown scheme {self.kind!r}; expected one of {', '.join(SCHEME_KINDS)}")
        if not 0 <= self.m2 <= MAX_M2:
            raise ConfigError(f"m2 must be in [0, {MAX_M2}], got {self.m2}")
        if self.range_factor is not None and not self.range_factor > 0:
            raise ConfigError("range factor must be positive")

    @property
    def label(self) -> str:
        parts = [self.kind]
        if self.kind == "onebit":
            parts.append(f"m2={self.m2}")
        if self.range_factor is not None:
            parts.append(f"range={self.range_factor:g}")
        return ":".join(parts)

    def __str__(self):
        return self.label


def parse_scheme(token: str) -> SchemeSpec:
    """Parse ``kind[:m2=<int>][:range=<float>]``."""
    parts = [p.strip() for p in token.strip().split(":") if p.strip()]
    if not parts:
        raise ConfigError("empty scheme token")
    kw = {}
    for opt in parts[1:]:
        key, sep, val = opt.partition("=")
        if not sep:
            raise ConfigError(f"malformed scheme option {opt!r} in {token!r}")
        try:
            if key == "m2":
                kw["m2"] = int(val)
            elif key == "range":
                kw["range_factor"] = float(val)
            else:
                raise ConfigError(f"unknown scheme option {key!r} in {token!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value in scheme option {opt!r}") from exc
    return SchemeSpec(parts[0], **kw)


def _default_schemes():
    return (SchemeSpec("inf_total"), SchemeSpec("onebit"))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "ser_vs_snr"
    k_users: int = 1
    m_antennas: tuple[int, ...] = (128,)
    n_side: int = 4
    power: float = 1.0
    snr_db: tuple[float, ...] = (0.0,)
    lambdas: tuple[float, ...] = (0.5, 0.6, 0.7, 0.75, 0.8, 0.85, 0.9, 1.0)
    schemes: tuple[SchemeSpec, ...] = field(default_factory=_default_schemes)
    trials: int = 1000
    symbols_per_channel: int = 200
    master_seed: int = 0
    kappa: float = 2.0
    hardened_range: bool = False
    mse_target: str = "qam"

    def __post_init__(self):
        for name in ("m_antennas", "snr_db", "lambdas", "schemes"):
            val = getattr(self, name)
            if not isinstance(val, tuple):
                object.__setattr__(self, name, tuple(val) if hasattr(val, "__iter__") else (val,))
        object.__setattr__(self, "schemes", tuple(
            s if isinstance(s, SchemeSpec) else parse_scheme(s) for s in self.schemes))
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        for name in ("m_antennas", "snr_db", "lambdas", "schemes"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        for name in ("m_antennas", "snr_db", "lambdas"):
            grid = list(getattr(self, name))
            if grid != sorted(grid):
                raise ConfigError(f"{name} must be sorted ascending")
            if not all(math.isfinite(v) for v in grid):
                raise ConfigError(f"{name} must be finite")
        if self.k_users < 1:
            raise ConfigError("k_users must be >= 1")
        if min(self.m_antennas) < self.k_users:
            raise ConfigError("need m_antennas >= k_users")
        if self.n_side < 2 or self.n_side % 2:
            raise ConfigError("n_side must be even and >= 2")
        if not self.power > 0:
            raise ConfigError("power must be positive")
        if self.trials < 1 or self.symbols_per_channel < 1:
            raise ConfigError("trials and symbols_per_channel must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.kappa < 0:
            raise ConfigError("kappa must be non-negative")
        if min(self.lambdas) <= 0:
            raise ConfigError("lambdas must be positive")
        if self.mse_target not in ("qam", "gamma"):
            raise ConfigError("mse_target must be 'qam' or 'gamma'")
        if self.mse_target == "gamma" and self.k_users != 1:
            raise ConfigError("mse_target = gamma is single-user only")
        for s in self.schemes:
            if s.kind in SINGLE_USER_ONLY and self.k_users != 1:
                raise ConfigError(f"scheme {s.kind} is single-user only")
            if s.kind == "oracle" and max(self.m_antennas) > ORACLE_MAX_M:
                raise ConfigError(f"oracle scheme requires M <= {ORACLE_MAX_M}")
            if s.kind == "onebit" and s.m2 > min(self.m_antennas):
                raise ConfigError("onebit m2 exceeds the antenna count")
        labels = [s.label for s in self.schemes]
        if len(set(labels)) != len(labels):
            raise ConfigError("duplicate schemes")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = [s.label for s in self.schemes]
        d["m_antennas"] = list(self.m_antennas)
        d["snr_db"] = list(self.snr_db)
        d["lambdas"] = list(self.lambdas)
        return d


# -- text format ---------------------------------------------------------------

def _num_list(text: str, conv):
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            lo, hi, step = (float(v) for v in item.split(":"))
            if step <= 0:
                raise ConfigError(f"range step must be positive in {item!r}")
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            out.extend(conv(round(lo + i * step, 12)) for i in range(n))
        else:
            out.append(conv(float(item)) if conv is int else conv(item))
    return tuple(out)


def _to_int(v):
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v!r} is not an integer")
    return int(f)


def _to_bool(v):
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{v!r} is not a boolean")


_PARSERS = {
    "kind": lambda v: v.strip().replace("-", "_"),
    "k_users": _to_int,
    "m_antennas": lambda v: _num_list(v, _to_int),
    "n_side": _to_int,
    "power": float,
    "snr_db": lambda v: _num_list(v, float),
    "lambdas": lambda v: _num_list(v, float),
    "schemes": lambda v: tuple(parse_scheme(t) for t in v.split(",") if t.strip()),
    "trials": _to_int,
    "symbols_per_channel": _to_int,
    "master_seed": lambda v: int(v.strip(), 0),
    "kappa": float,
    "hardened_range": _to_bool,
    "mse_target": lambda v: v.strip(),
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_assignments(pairs, base: dict | None = None) -> dict:
    values = dict(base or {})
    for lineno, key, raw in pairs:
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return values


def _split_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        yield lineno, key.strip(), val.strip()


def parse_config_text(text: str, overrides=()) -> ExperimentConfig:
    """Parse config text; ``overrides`` is an iterable of ``"key=value"`` strings applied last."""
    values = parse_assignments(_split_lines(text))
    extra = []
    for item in overrides:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        extra.append(("override", key.strip(), val.strip()))
    values = parse_assignments(extra, values)
    return ExperimentConfig(**values)


def load_config(path, overrides=()) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config_text(text, overrides)
