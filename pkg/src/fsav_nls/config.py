"""Flat ``key=value`` experiment configuration.

One pair per line, ``#`` starts a comment, keys are the field names of
:class:`ExperimentConfig`. Lists are comma separated. A ``preset`` line
fills in every field the preset defines; explicit keys override it
regardless of their position in the file. ``alpha`` is never taken from a
preset (presets carry a sweep, a run needs one value).

Example::

    preset = ex4_1
    alpha = 1.4
    tau = 0.01
"""

import dataclasses
import math
from dataclasses import dataclass, field

from .errors import ConfigTypeError, ConstraintViolation, UnknownKey
from .presets import INITIAL_CONDITIONS, POTENTIALS, PRESETS

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "validate",
    "validate_time_ladder",
    "validate_space_ladder",
]

SCHEMES = ("fsav", "cnf")


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str | None = None
    dim: int | None = None
    domain: tuple | None = None
    n: int | None = None
    alpha: float | None = None
    gamma: float = 1.0
    beta: float = 1.0
    potential: str = "zero"
    initial_condition: str | None = None
    c0: float = 0.0
    tau: float | None = None
    t_final: float | None = None
    scheme: str = "fsav"
    stride: int = 1
    output_dir: str = "."
    seed: int = 0
    taus: tuple = ()
    ns: tuple = ()
    snapshot_times: tuple = ()
    raw_fields: bool = False
    allow_any_alpha: bool = False
    denominator_guard: float = 1e-12
    cnf_tol: float = 1e-12
    cnf_max_iter: int = 100
    rh_tol: float = 1e-9
    order_target: float = 2.0
    order_tol: float = 0.1
    # line numbers of explicitly given keys, for error messages
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)


def _to_bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _to_int(s):
    f = float(s)
    if not f.is_integer():
        raise ValueError(f"not an integer: {s!r}")
    return int(f)


def _list_of(conv):
    def parse(s):
        return tuple(conv(p) for p in s.split(",") if p.strip())

    return parse


_FIELD_TYPES = {
    "preset": str,
    "dim": _to_int,
    "domain": _list_of(float),
    "n": _to_int,
    "alpha": float,
    "gamma": float,
    "beta": float,
    "potential": str,
    "initial_condition": str,
    "c0": float,
    "tau": float,
    "t_final": float,
    "scheme": str,
    "stride": _to_int,
    "output_dir": str,
    "seed": _to_int,
    "taus": _list_of(float),
    "ns": _list_of(_to_int),
    "snapshot_times": _list_of(float),
    "raw_fields": _to_bool,
    "allow_any_alpha": _to_bool,
    "denominator_guard": float,
    "cnf_tol": float,
    "cnf_max_iter": _to_int,
    "rh_tol": float,
    "order_target": float,
    "order_tol": float,
}


def _tokenize(text):
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigTypeError(f"expected key=value, got {raw.strip()!r}", lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise UnknownKey(f"unknown key {key!r}", lineno)
        try:
            values[key] = _FIELD_TYPES[key](val)
        except ValueError as exc:
            raise ConfigTypeError(f"bad value for {key!r}: {exc}", lineno) from None
        lines[key] = lineno
    return values, lines


def parse_config(text):
    """Parse and validate a configuration text into :class:`ExperimentConfig`."""
    values, lines = _tokenize(text)
    base = {}
    name = values.get("preset")
    if name is not None:
        if name not in PRESETS:
            raise ConstraintViolation(
                f"unknown preset {name!r} (known: {', '.join(PRESETS)})", lines["preset"]
            )
        p = PRESETS[name]
        base = dict(
            dim=p.dim, domain=p.domain, n=p.n, gamma=p.gamma, beta=p.beta,
            potential=p.potential, initial_condition=p.initial_condition,
            tau=p.tau, t_final=p.t_final, taus=p.taus, ns=p.ns,
        )
    base.update(values)
    cfg = ExperimentConfig(**base, lines=lines)
    validate(cfg)
    return cfg


def load_config(path):
    with open(path) as f:
        return parse_config(f.read())


def _fail(cfg, key, msg):
    raise ConstraintViolation(f"{key}: {msg}", cfg.lines.get(key))


def _require(cfg, key):
    if getattr(cfg, key) is None:
        _fail(cfg, key, f"`{key}` is required" + (" (presets carry a sweep, pick one value)" if key == "alpha" else ""))


def _check_divides(cfg, key, T, tau):
    ratio = T / tau
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
        _fail(cfg, key, f"t_final={T} is not an integer multiple of tau={tau}")


def validate(cfg):
    """Raise :class:`ConstraintViolation` for the first violated constraint."""
    for key in ("dim", "domain", "n", "alpha", "initial_condition", "tau", "t_final"):
        _require(cfg, key)
    if cfg.dim not in (1, 2):
        _fail(cfg, "dim", f"must be 1 or 2, got {cfg.dim}")
    if len(cfg.domain) != 2 or not cfg.domain[1] > cfg.domain[0]:
        _fail(cfg, "domain", f"need 'x_L, x_R' with x_R > x_L, got {cfg.domain}")
    if cfg.n < 4 or cfg.n % 2:
        _fail(cfg, "n", f"must be even and >= 4, got {cfg.n}")
    lo = 0.0 if cfg.allow_any_alpha else 1.0
    if not lo < cfg.alpha <= 2.0:
        _fail(cfg, "alpha", f"{cfg.alpha} outside ({lo:g}, 2]")
    if not cfg.gamma > 0:
        _fail(cfg, "gamma", f"must be positive, got {cfg.gamma}")
    if not cfg.c0 >= 0:
        _fail(cfg, "c0", f"must be non-negative, got {cfg.c0}")
    if not math.isfinite(cfg.beta):
        _fail(cfg, "beta", "must be finite")
    if cfg.potential not in POTENTIALS:
        _fail(cfg, "potential", f"unknown potential {cfg.potential!r} (known: {', '.join(POTENTIALS)})")
    if cfg.initial_condition not in INITIAL_CONDITIONS:
        _fail(cfg, "initial_condition", f"unknown initial condition {cfg.initial_condition!r}")
    if cfg.dim not in INITIAL_CONDITIONS[cfg.initial_condition][1]:
        _fail(cfg, "initial_condition", f"{cfg.initial_condition!r} is not defined in {cfg.dim}D")
    if not cfg.tau > 0:
        _fail(cfg, "tau", f"must be positive, got {cfg.tau}")
    if not cfg.t_final > 0:
        _fail(cfg, "t_final", f"must be positive, got {cfg.t_final}")
    _check_divides(cfg, "tau", cfg.t_final, cfg.tau)
    if cfg.scheme not in SCHEMES:
        _fail(cfg, "scheme", f"must be one of {SCHEMES}, got {cfg.scheme!r}")
    if cfg.stride < 1:
        _fail(cfg, "stride", f"must be >= 1, got {cfg.stride}")
    if not cfg.cnf_tol > 0:
        _fail(cfg, "cnf_tol", "must be positive")
    if cfg.cnf_max_iter < 1:
        _fail(cfg, "cnf_max_iter", "must be >= 1")
    for t in cfg.snapshot_times:
        if not 0 <= t <= cfg.t_final:
            _fail(cfg, "snapshot_times", f"{t} outside [0, t_final]")
        if t > 0:
            _check_divides(cfg, "snapshot_times", t, cfg.tau)
    for tau in cfg.taus:
        if not tau > 0:
            _fail(cfg, "taus", f"must be positive, got {tau}")
        _check_divides(cfg, "taus", cfg.t_final, tau)
    for n in cfg.ns:
        if n < 4 or n % 2:
            _fail(cfg, "ns", f"each N must be even and >= 4, got {n}")


def validate_time_ladder(cfg):
    """The ``taus`` of a temporal study must be successive halvings."""
    for a, b in zip(cfg.taus, cfg.taus[1:]):
        if abs(a / b - 2.0) > 1e-9:
            _fail(cfg, "taus", f"ladder must be successive halvings, got {a} -> {b}")
    if cfg.taus:
        _check_divides(cfg, "taus", cfg.t_final, cfg.taus[-1] / 2)


def validate_space_ladder(cfg):
    """The ``ns`` of a spatial study must be successive doublings."""
    for a, b in zip(cfg.ns, cfg.ns[1:]):
        if b != 2 * a:
            _fail(cfg, "ns", f"ladder must be successive doublings, got {a} -> {b}")
