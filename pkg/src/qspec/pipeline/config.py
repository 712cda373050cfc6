"""Run configuration: a flat ``key = value`` file overlaid by command-line flags."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..core import check_quantiles, get_kernel
from ..errors import ConfigError, ParseError


def parse_quantiles(text) -> tuple[float, ...]:
    if isinstance(text, (tuple, list)):
        return check_quantiles(text)
    try:
        vals = [float(s) for s in str(text).replace(" ", "").split(",") if s]
    except ValueError:
        raise ConfigError(f"cannot parse quantile list {text!r}") from None
    return check_quantiles(vals)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def _opt_int(text):
    return None if text in (None, "", "none") else int(text)


@dataclass(frozen=True)
class RunConfig:
    input: str | None = None
    column: str = "0"
    preset: str = "tvar2-gauss"
    T: int | None = None
    n: int = 512
    bandwidth: float = 25.0
    kernel: str = "parzen"
    stride: int | None = None
    quantiles: tuple[float, ...] = (0.1, 0.5, 0.9)
    M: int = 1000
    R: int = 200
    length: int = 2048
    J: int = 10
    seed: int = 0
    bands: str | None = None
    field: str | None = None
    out: str | None = None
    fixed_divisor: bool = False
    render: bool = True
    variance_halfwidth: int = 50
    innovations: str = "uniform"

    def __post_init__(self):
        object.__setattr__(self, "quantiles", parse_quantiles(self.quantiles))
        get_kernel(self.kernel)
        if self.n % 2 or self.n < 4:
            raise ConfigError(f"n must be even and >= 4, got {self.n}")
        if self.T is not None and self.n > self.T:
            raise ConfigError(f"window length n={self.n} exceeds T={self.T}")
        if self.stride is not None and self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        for name in ("M", "R", "J", "length", "variance_halfwidth"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")

    def with_T(self, T: int) -> "RunConfig":
        return replace(self, T=int(T))


_CONVERT = {
    "T": _opt_int, "n": int, "bandwidth": float, "stride": _opt_int, "quantiles": parse_quantiles,
    "M": int, "R": int, "length": int, "J": int, "seed": int, "fixed_divisor": _bool,
    "render": _bool, "variance_halfwidth": int,
}
KEYS = tuple(f.name for f in fields(RunConfig))


def normalize_key(key: str) -> str:
    k = key.strip().replace("-", "_")
    if k not in KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    return k


def convert(key: str, value):
    try:
        return _CONVERT.get(key, str)(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value {value!r} for {key}: {exc}") from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                k = normalize_key(key)
                out[k] = convert(k, value)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return out


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """File values first, then ``overrides`` (entries set to None are ignored)."""
    values = read_config_file(path) if path else {}
    for k, v in (overrides or {}).items():
        if v is not None:
            k = normalize_key(k)
            values[k] = convert(k, v)
    return RunConfig(**values)
