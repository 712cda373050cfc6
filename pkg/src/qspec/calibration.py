"""White-noise calibration of significance bands and the heatmap colour scale."""
from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import ndtri

from .core import EstimationPlan, SpectralField, get_kernel
from .errors import ConfigError, ParseError
from .estimator import LagTable, order_rank, window_spectra
from .rng import pmap, stream

__all__ = [
    "CYAN", "LIGHT_BLUE", "DARK_BLUE", "YELLOW", "ORANGE", "RED",
    "CalibrationBands",
    "ColorScale",
    "ScaleEntry",
    "calibrate",
    "replicate_extrema",
    "extend_scale",
    "colorize",
    "palette_position",
    "palette_color",
    "save_bands",
    "load_bands",
]

CYAN = (0, 255, 255)
LIGHT_BLUE = (100, 150, 255)
DARK_BLUE = (0, 0, 139)
YELLOW = (255, 255, 0)
ORANGE = (255, 140, 0)
RED = (255, 0, 0)

PARTS = ("re", "im")
LOWER_LEVEL = Fraction(5, 1000)
UPPER_LEVEL = Fraction(995, 1000)


def _key(tau1: float, tau2: float, part: str) -> tuple[float, float, str]:
    if part not in PARTS:
        raise ConfigError(f"part must be one of {PARTS}, got {part!r}")
    return (float(tau1), float(tau2), part)


@dataclass
class CalibrationBands:
    """``(q_min, q_max)`` per ``(tau1, tau2, part)`` plus the parameters that produced them."""

    entries: dict
    n: int
    bandwidth: float
    kernel: str
    M: int
    seed: int

    def __post_init__(self):
        for key, (lo, hi) in self.entries.items():
            if lo > hi:
                raise ConfigError(f"band {key} has q_min > q_max")

    def get(self, tau1: float, tau2: float, part: str) -> tuple[float, float]:
        key = _key(tau1, tau2, part)
        for k, v in self.entries.items():
            if k[2] == part and math.isclose(k[0], key[0], abs_tol=1e-12) \
                    and math.isclose(k[1], key[1], abs_tol=1e-12):
                return v
        raise ConfigError(f"no calibration band for (tau1={tau1}, tau2={tau2}, part={part})")

    @property
    def quantiles(self) -> tuple[float, ...]:
        return tuple(sorted({k[0] for k in self.entries}))

    def matches(self, plan: EstimationPlan) -> bool:
        return (plan.n == self.n and plan.bandwidth == self.bandwidth
                and plan.kernel.name == self.kernel)


def _type1_quantile(sorted_values: np.ndarray, level: Fraction) -> float:
    M = sorted_values.size
    return float(sorted_values[max(1, math.ceil(level * M)) - 1])


def replicate_extrema(plan: EstimationPlan, M: int, seed: int, innovations: str = "uniform",
                      chunk: int = 250) -> tuple[np.ndarray, np.ndarray]:
    """Per-replication frequency minima and maxima, shape ``(M, nq, nq, 2)`` each.

    The last axis holds the real and imaginary parts.  Replication ``m``
    uses the stream keyed ``(seed, m)``, so results do not depend on ``chunk``.
    """
    n = plan.n
    table = LagTable.for_plan(plan)
    h_q = plan.quantile_halfwidth
    c = 2 * h_q + 1
    centre = n // 2
    rank = np.array([order_rank(t, c) - 1 for t in plan.quantiles])

    def run(block):
        u = np.stack([stream(seed, m).random(n) for m in block])
        if innovations == "normal":
            u = ndtri(u)
        elif innovations != "uniform":
            raise ConfigError(f"unknown calibration innovations {innovations!r}")
        qwin = np.sort(u[:, centre - h_q - 1:centre + h_q], axis=1)
        qhat = qwin[:, rank]
        spec = window_spectra(u, qhat, plan.quantiles, table)
        parts = np.stack([spec.real, spec.imag], axis=-1)
        return parts.min(axis=1), parts.max(axis=1)

    blocks = [range(i, min(M, i + chunk)) for i in range(0, M, chunk)]
    res = pmap(run, blocks)
    return (np.concatenate([r[0] for r in res]), np.concatenate([r[1] for r in res]))


def calibrate(plan: EstimationPlan, M: int = 1000, seed: int = 0,
              innovations: str = "uniform") -> CalibrationBands:
    """Simulate ``M`` white-noise windows and take extreme quantiles of frequency extrema.

    ``q_max`` is the 99.5% quantile of the per-replication maxima over
    frequency and ``q_min`` the 0.5% quantile of the minima, both using the
    inverted-ECDF (type 1) quantile.
    """
    if M < 100:
        raise ConfigError(f"calibration needs M >= 100 replications, got {M}")
    if len(plan.t0_grid) != 1:
        raise ConfigError("calibration plan must have a single t0 "
                          "(use EstimationPlan.single_window)")
    lo, hi = replicate_extrema(plan, M, seed, innovations)
    lo = np.sort(lo, axis=0)
    hi = np.sort(hi, axis=0)
    entries = {}
    for a, t1 in enumerate(plan.quantiles):
        for b, t2 in enumerate(plan.quantiles):
            for p, part in enumerate(PARTS):
                if part == "im" and a == b:
                    entries[(t1, t2, part)] = (0.0, 0.0)
                    continue
                entries[(t1, t2, part)] = (_type1_quantile(lo[:, a, b, p], LOWER_LEVEL),
                                           _type1_quantile(hi[:, a, b, p], UPPER_LEVEL))
    return CalibrationBands(entries, plan.n, plan.bandwidth, plan.kernel.name, M, seed)


# --------------------------------------------------------------------------
# colour scale

@dataclass(frozen=True)
class ScaleEntry:
    q_min: float
    q_max: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not self.v_min <= self.q_min <= self.q_max <= self.v_max:
            raise ConfigError(f"malformed scale entry {self}")


@dataclass
class ColorScale:
    entries: dict = field(default_factory=dict)

    def get(self, tau1: float, tau2: float, part: str) -> ScaleEntry:
        try:
            return self.entries[_key(tau1, tau2, part)]
        except KeyError:
            raise ConfigError(
                f"no colour scale for (tau1={tau1}, tau2={tau2}, part={part})") from None


def extend_scale(bands: CalibrationBands, field: SpectralField) -> ColorScale:
    """Widen each band to the field's range, or to one band-width beyond it."""
    if field.plan is not None and not bands.matches(field.plan):
        raise ConfigError(
            f"bands were calibrated for n={bands.n}, B_n={bands.bandwidth}, "
            f"kernel={bands.kernel}; field uses n={field.plan.n}, "
            f"B_n={field.plan.bandwidth}, kernel={field.plan.kernel.name}")
    if field.plan is None and field.n != bands.n:
        raise ConfigError(f"bands were calibrated for n={bands.n}, field has n={field.n}")
    scale = ColorScale()
    for t1 in field.quantiles:
        for t2 in field.quantiles:
            for part in PARTS:
                q_min, q_max = bands.get(t1, t2, part)
                vals = field.component(t1, t2, part)
                width = q_max - q_min
                v_min = min(float(vals.min()), q_min - width)
                v_max = max(float(vals.max()), q_max + width)
                scale.entries[_key(t1, t2, part)] = ScaleEntry(q_min, q_max, v_min, v_max)
    return scale


# palette positions: 0 cyan, 1/3 light blue, 2/3 dark blue (lower ramp);
# 2/3 dark blue, 5/6 yellow, 11/12 orange, 1 red (upper ramp)
_LOWER = ((0.0, CYAN), (0.5, LIGHT_BLUE), (1.0, DARK_BLUE))
_UPPER = ((0.0, DARK_BLUE), (0.5, YELLOW), (0.75, ORANGE), (1.0, RED))
_BAND_POS = 2.0 / 3.0


def _ramp(anchors, s: float) -> tuple[int, int, int]:
    s = min(max(s, 0.0), 1.0)
    for (s0, c0), (s1, c1) in zip(anchors, anchors[1:]):
        if s <= s1:
            w = 0.0 if s1 == s0 else (s - s0) / (s1 - s0)
            return tuple(int(round(a + w * (b - a))) for a, b in zip(c0, c1))
    return anchors[-1][1]


def palette_position(value: float, entry: ScaleEntry) -> float:
    """Monotone map of ``value`` to ``[0, 1]``; the band maps to ``2/3``."""
    if entry.q_min <= value <= entry.q_max:
        return _BAND_POS
    if value < entry.q_min:
        span = entry.q_min - entry.v_min
        s = 0.0 if span <= 0 else (value - entry.v_min) / span
        return _BAND_POS * min(max(s, 0.0), 1.0)
    span = entry.v_max - entry.q_max
    s = 1.0 if span <= 0 else (value - entry.q_max) / span
    return _BAND_POS + (1.0 - _BAND_POS) * min(max(s, 0.0), 1.0)


def palette_color(pos: float) -> tuple[int, int, int]:
    if pos <= _BAND_POS:
        return _ramp(_LOWER, pos / _BAND_POS)
    return _ramp(_UPPER, (pos - _BAND_POS) / (1.0 - _BAND_POS))


def colorize(value: float, entry: ScaleEntry) -> tuple[int, int, int]:
    """RGB colour for ``value``: dark blue inside the band, ramps outside, clamped at the ends."""
    return palette_color(palette_position(float(value), entry))


# --------------------------------------------------------------------------
# serialization

def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def save_bands(bands: CalibrationBands, path) -> None:
    """Write bands as ``key = value`` lines; band keys are ``band tau1 tau2 part``."""
    lines = [
        "# qspec calibration bands",
        f"n = {bands.n}",
        f"bandwidth = {_fmt(bands.bandwidth)}",
        f"kernel = {bands.kernel}",
        f"M = {bands.M}",
        f"seed = {bands.seed}",
    ]
    for (t1, t2, part), (lo, hi) in sorted(bands.entries.items()):
        lines.append(f"band {_fmt(t1)} {_fmt(t2)} {part} = {_fmt(lo)} {_fmt(hi)}")
    text = "\n".join(lines) + "\n"
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".bands-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_bands(path) -> CalibrationBands:
    meta, entries = {}, {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                if key.startswith("band "):
                    _, t1, t2, part = key.split()
                    lo, hi = value.split()
                    entries[_key(float(t1), float(t2), part)] = (float(lo), float(hi))
                else:
                    meta[key] = value
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    try:
        return CalibrationBands(entries, int(meta["n"]), float(meta["bandwidth"]),
                                get_kernel(meta["kernel"]).name, int(meta["M"]),
                                int(meta["seed"]))
    except KeyError as exc:
        raise ParseError(f"{path}: missing key {exc}") from None
