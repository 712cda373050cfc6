"""Domain types, grids and index arithmetic.

Time indices are 1-based throughout the public API: a series ``x`` of
length ``T`` holds observations ``x_1..x_T`` at array positions ``0..T-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BoundaryError, ConfigError, DomainError

__all__ = [
    "LagWindow",
    "PARZEN",
    "BARTLETT",
    "KERNELS",
    "get_kernel",
    "as_series",
    "check_quantiles",
    "FrequencyGrid",
    "EstimationPlan",
    "SpectralField",
    "default_t0_grid",
    "quantile_halfwidth",
    "fourier_snap",
    "neighborhood",
]


def as_series(values, name: str = "series") -> np.ndarray:
    """Validate and return ``values`` as a finite 1-D float64 array."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ConfigError(f"{name} must be one-dimensional, got shape {x.shape}")
    if x.size < 1:
        raise ConfigError(f"{name} is empty")
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        raise DomainError(f"{name} has a non-finite value at t={bad[0] + 1}")
    return x


def check_quantiles(taus: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(t) for t in taus)
    if not out:
        raise ConfigError("at least one quantile level is required")
    for t in out:
        if not 0.0 < t < 1.0:
            raise DomainError(f"quantile level {t} outside (0, 1)")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"quantile levels must be sorted and distinct: {out}")
    return out


# --------------------------------------------------------------------------
# lag windows

def _parzen(u):
    a = np.abs(np.asarray(u, dtype=np.float64))
    out = np.where(a <= 0.5, 1.0 - 6.0 * a**2 + 6.0 * a**3, 2.0 * (1.0 - a) ** 3)
    return np.where(a > 1.0, 0.0, out)


def _bartlett(u):
    a = np.abs(np.asarray(u, dtype=np.float64))
    return np.where(a > 1.0, 0.0, 1.0 - a)


@dataclass(frozen=True)
class LagWindow:
    """An even lag-window function supported on [-1, 1].

    ``char_exponent`` and ``c_k_r`` are the characteristic exponent ``r``
    and the limit constant ``lim (1 - K(u)) / |u|**r`` as ``u -> 0``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    char_exponent: int
    c_k_r: float

    def __call__(self, u):
        out = self.func(u)
        return float(out) if np.ndim(out) == 0 else out

    def lag_weights(self, bandwidth: float, max_lag: int) -> np.ndarray:
        """``K(k / B)`` for ``k = 0..max_lag``."""
        k = np.arange(max_lag + 1, dtype=np.float64)
        return np.asarray(self.func(k / bandwidth), dtype=np.float64)


PARZEN = LagWindow("parzen", _parzen, 2, 6.0)
BARTLETT = LagWindow("bartlett", _bartlett, 1, 1.0)
KERNELS = {k.name: k for k in (PARZEN, BARTLETT)}


def get_kernel(kernel: str | LagWindow) -> LagWindow:
    if isinstance(kernel, LagWindow):
        return kernel
    try:
        return KERNELS[kernel.lower()]
    except KeyError:
        raise ConfigError(f"unknown lag window {kernel!r}; known: {sorted(KERNELS)}") from None


# --------------------------------------------------------------------------
# grids

@dataclass(frozen=True)
class FrequencyGrid:
    """Interior Fourier frequencies ``2*pi*j/n`` for ``j = 1..n/2-1``."""

    n: int

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ConfigError(f"window length must be even and >= 4, got {self.n}")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(1, self.n // 2)

    @property
    def frequencies(self) -> np.ndarray:
        return 2.0 * np.pi * self.indices / self.n

    def __len__(self) -> int:
        return self.n // 2 - 1


def quantile_halfwidth(n: int) -> int:
    """Half-width ``floor((n/2)**(4/5))`` of the local quantile window."""
    return max(1, int(math.floor((n // 2) ** 0.8)))


def default_t0_grid(T: int, n: int) -> tuple[int, ...]:
    """Window centres ``n/2 * (k+1)`` for ``k = 0..floor(2(T-n)/n)``."""
    if n > T:
        raise ConfigError(f"window length n={n} exceeds series length T={T}")
    kmax = (2 * (T - n)) // n
    return tuple((n // 2) * (k + 1) for k in range(kmax + 1))


@dataclass(frozen=True)
class EstimationPlan:
    """Everything the local lag-window estimator needs besides the data."""

    T: int
    n: int
    bandwidth: float
    quantiles: tuple[float, ...]
    t0_grid: tuple[int, ...]
    kernel: LagWindow = PARZEN

    def __post_init__(self):
        object.__setattr__(self, "kernel", get_kernel(self.kernel))
        object.__setattr__(self, "quantiles", check_quantiles(self.quantiles))
        object.__setattr__(self, "t0_grid", tuple(int(t) for t in self.t0_grid))
        FrequencyGrid(self.n)
        if self.n > self.T:
            raise ConfigError(f"window length n={self.n} exceeds series length T={self.T}")
        if not 1.0 <= self.bandwidth < self.n:
            raise ConfigError(f"bandwidth must satisfy 1 <= B_n < n, got {self.bandwidth}")
        if not self.t0_grid:
            raise ConfigError("empty t0 grid")
        for t0 in self.t0_grid:
            check_window(t0, self.n, self.T)

    @classmethod
    def build(cls, T: int, n: int, bandwidth: float, quantiles=(0.1, 0.5, 0.9),
              kernel: str | LagWindow = "parzen", t0_grid=None, stride: int | None = None):
        """Plan with the default t0 grid, or a strided one when ``stride`` is set."""
        if t0_grid is None:
            if stride is None:
                t0_grid = default_t0_grid(T, n)
            else:
                t0_grid = tuple(range(n // 2, T - n // 2 + 1, int(stride)))
        return cls(T=int(T), n=int(n), bandwidth=float(bandwidth), quantiles=tuple(quantiles),
                   t0_grid=tuple(t0_grid), kernel=get_kernel(kernel))

    @classmethod
    def single_window(cls, n: int, bandwidth: float, quantiles=(0.1, 0.5, 0.9),
                      kernel: str | LagWindow = "parzen"):
        """Plan for a series of exactly one window (``T = n``, ``t0 = n/2``)."""
        return cls.build(n, n, bandwidth, quantiles, kernel, t0_grid=(n // 2,))

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def quantile_halfwidth(self) -> int:
        return quantile_halfwidth(self.n)

    @property
    def freq_grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.n)

    @property
    def max_lag(self) -> int:
        """Largest lag with a possibly non-zero kernel weight."""
        return min(self.n - 1, int(math.floor(self.bandwidth)))

    def with_(self, **changes) -> "EstimationPlan":
        kw = dict(T=self.T, n=self.n, bandwidth=self.bandwidth, quantiles=self.quantiles,
                  t0_grid=self.t0_grid, kernel=self.kernel)
        kw.update(changes)
        return EstimationPlan(**kw)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex estimates indexed by ``(t0, omega, tau1, tau2)``.

    ``plan`` is ``None`` for fields read back from disk without plan
    metadata; the grids are always present.
    """

    values: np.ndarray
    t0_grid: tuple[int, ...]
    freqs: np.ndarray
    quantiles: tuple[float, ...]
    plan: EstimationPlan | None = None

    def __post_init__(self):
        shape = (len(self.t0_grid), len(self.freqs), len(self.quantiles), len(self.quantiles))
        if self.values.shape != shape:
            raise ConfigError(f"field values have shape {self.values.shape}, expected {shape}")

    @classmethod
    def from_plan(cls, values: np.ndarray, plan: EstimationPlan) -> "SpectralField":
        return cls(values, plan.t0_grid, plan.freq_grid.frequencies, plan.quantiles, plan)

    @property
    def n(self) -> int:
        return 2 * (len(self.freqs) + 1)

    def tau_index(self, tau: float) -> int:
        for i, t in enumerate(self.quantiles):
            if t == tau or math.isclose(t, tau, rel_tol=0, abs_tol=1e-12):
                return i
        raise ConfigError(f"quantile level {tau} not in field {self.quantiles}")

    def component(self, tau1: float, tau2: float, part: str | None = None) -> np.ndarray:
        """``(t0, omega)`` slice for a quantile pair, optionally ``'re'``/``'im'``."""
        v = self.values[:, :, self.tau_index(tau1), self.tau_index(tau2)]
        if part is None:
            return v
        if part == "re":
            return v.real
        if part == "im":
            return v.imag
        raise ConfigError(f"part must be 're' or 'im', got {part!r}")

    def same_grid(self, other: "SpectralField") -> bool:
        return (tuple(self.t0_grid) == tuple(other.t0_grid)
                and self.quantiles == other.quantiles
                and len(self.freqs) == len(other.freqs)
                and np.array_equal(self.freqs, other.freqs))


# --------------------------------------------------------------------------
# index arithmetic

def fourier_snap(omega: float, n: int) -> float:
    """Nearest interior Fourier frequency ``2*pi*j/n``; ties go to the larger ``j``."""
    if n < 4 or n % 2:
        raise ConfigError(f"window length must be even and >= 4, got {n}")
    if not 0.0 < omega < math.pi:
        raise DomainError(f"frequency {omega} outside (0, pi)")
    return 2.0 * math.pi * snap_index(omega, n) / n


def snap_index(omega: float, n: int) -> int:
    j = math.floor(omega * n / (2.0 * math.pi) + 0.5)
    return min(max(j, 1), n // 2 - 1)


def check_window(t0: int, n: int, T: int) -> None:
    if t0 - n // 2 < 0 or t0 + n // 2 > T:
        raise BoundaryError(
            f"window of length {n} centred at t0={t0} leaves the sample 1..{T}")


def neighborhood(t0: int, plan_or_n, T: int | None = None) -> range:
    """Indices ``t`` with ``t0 - n/2 < t <= t0 + n/2`` (1-based)."""
    if isinstance(plan_or_n, EstimationPlan):
        n, T = plan_or_n.n, plan_or_n.T
    else:
        n = int(plan_or_n)
        if T is None:
            raise ConfigError("series length T is required")
    check_window(t0, n, T)
    return range(t0 - n // 2 + 1, t0 + n // 2 + 1)
