"""Locally stationary process simulators and the tvARCH(0) bootstrap.

Every model maps a vector of rescaled times ``u`` (one per emitted step,
burn-in included) and a block of innovations to a path.  The
non-stationary simulator uses ``u = t/T``; the stationary approximation at
``theta`` uses ``u = theta`` throughout.  Innovations may carry a leading
replication axis, so ``R`` independent paths are produced by one call.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import PARZEN, as_series
from .errors import ConfigError, DomainError, SimulationError
from .rng import stream

__all__ = [
    "ProcessModel",
    "IID",
    "TvAR2",
    "TvQAR1",
    "TvMA",
    "TvARCHInf",
    "TvGARCH",
    "TvARCH0Bootstrap",
    "tvarch1",
    "PRESETS",
    "preset",
    "simulate",
    "simulate_stationary",
    "simulate_paths",
    "lss_distance",
    "SigmaPath",
    "local_variance",
    "estimate_local_variance",
    "tvarch0_bootstrap",
]

BURN_IN = 1000
_U_GRID = (np.arange(1024) + 0.5) / 1024


def _draw(rng: np.random.Generator, dist: str, size) -> np.ndarray:
    if dist in ("gaussian", "normal"):
        return rng.standard_normal(size)
    if dist == "cauchy":
        return rng.standard_cauchy(size)
    if dist == "uniform":
        return rng.random(size)
    raise ConfigError(f"unknown innovation distribution {dist!r}")


def _check_finite(x: np.ndarray, burn: int) -> None:
    bad = ~np.isfinite(x)
    if np.any(bad):
        col = int(np.argmax(bad.reshape(-1, x.shape[-1]).any(axis=0)))
        where = f"burn-in step {col + 1}" if col < burn else f"t={col - burn + 1}"
        raise SimulationError(f"recursion overflowed at {where}")


class ProcessModel:
    """Base class; subclasses implement :meth:`run`."""

    noise: str = "gaussian"
    burn_in: int = BURN_IN

    def innovations(self, rng: np.random.Generator, size) -> np.ndarray:
        return _draw(rng, self.noise, size)

    def run(self, u: np.ndarray, eps: np.ndarray) -> np.ndarray:
        """Path for rescaled times ``u`` (length L) and innovations ``(..., L)``."""
        raise NotImplementedError

    @property
    def time_varying(self) -> bool:
        return True


@dataclass
class IID(ProcessModel):
    """Independent draws from a fixed distribution."""

    noise: str = "gaussian"
    burn_in: int = 0

    def run(self, u, eps):
        return np.array(eps, dtype=np.float64, copy=True)

    @property
    def time_varying(self) -> bool:
        return False


def _tvar2_a1(u):
    return 1.8 * np.cos(1.5 - np.cos(2.0 * np.pi * u))


@dataclass
class TvAR2(ProcessModel):
    """``X_t = a1(t/T) X_{t-1} + a2(t/T) X_{t-2} + Z_t``.

    Defaults give the model with ``a1(u) = 1.8 cos(1.5 - cos(2 pi u))`` and
    ``a2 = -0.81``.
    """

    noise: str = "gaussian"
    a1: Callable = _tvar2_a1
    a2: Callable = lambda u: -0.81 * np.ones_like(np.asarray(u, dtype=float))
    burn_in: int = BURN_IN

    def run(self, u, eps):
        eps = np.asarray(eps, dtype=np.float64)
        L = eps.shape[-1]
        c1 = np.broadcast_to(self.a1(np.asarray(u, dtype=float)), (L,))
        c2 = np.broadcast_to(self.a2(np.asarray(u, dtype=float)), (L,))
        x = np.zeros_like(eps)
        prev1 = np.zeros(eps.shape[:-1])
        prev2 = np.zeros(eps.shape[:-1])
        for t in range(L):
            cur = c1[t] * prev1 + c2[t] * prev2 + eps[..., t]
            x[..., t] = cur
            prev2, prev1 = prev1, cur
        _check_finite(x, self.burn_in)
        return x


@dataclass
class TvQAR1(ProcessModel):
    """Quantile autoregression with coefficient ``(1.9U - 0.95)(2u - 1)`` and shift ``U - 1/2``."""

    noise: str = "uniform"
    burn_in: int = BURN_IN

    def coefficient(self, u, U):
        return (1.9 * U - 0.95) * u + (-1.9 * U + 0.95) * (1.0 - u)

    def run(self, u, eps):
        U = np.asarray(eps, dtype=np.float64)
        L = U.shape[-1]
        uu = np.broadcast_to(np.asarray(u, dtype=float), (L,))
        x = np.zeros_like(U)
        prev = np.zeros(U.shape[:-1])
        for t in range(L):
            prev = self.coefficient(uu[t], U[..., t]) * prev + (U[..., t] - 0.5)
            x[..., t] = prev
        return x


@dataclass
class TvMA(ProcessModel):
    """``X_t = mu(t/T) + sum_{j=0}^{J} a(t/T, j) xi_{t-j}`` (causal truncation)."""

    a: Callable = None
    mu: Callable = lambda u: np.zeros_like(np.asarray(u, dtype=float))
    J: int = 100
    noise: str = "gaussian"
    burn_in: int = BURN_IN

    def __post_init__(self):
        if self.a is None:
            raise ConfigError("TvMA needs a coefficient function a(u, j)")
        if self.burn_in < self.J:
            raise ConfigError("burn-in must cover the MA truncation J")

    def run(self, u, eps):
        eps = np.asarray(eps, dtype=np.float64)
        L = eps.shape[-1]
        uu = np.broadcast_to(np.asarray(u, dtype=float), (L,))
        x = np.broadcast_to(self.mu(uu), eps.shape).astype(np.float64)
        for j in range(self.J + 1):
            coef = np.broadcast_to(self.a(uu, j), (L,))
            x[..., j:] += coef[j:] * eps[..., :L - j]
        return x


@dataclass
class TvARCHInf(ProcessModel):
    """``X_t = sigma_t Z_t``, ``sigma_t^2 = a0(t/T) + sum_{j=1}^{J} a(t/T, j) X_{t-j}^2``."""

    a0: Callable = None
    a: Callable = None
    J: int = 100
    noise: str = "gaussian"
    burn_in: int = BURN_IN

    def __post_init__(self):
        if self.a0 is None or self.a is None:
            raise ConfigError("TvARCHInf needs a0(u) and a(u, j)")
        coefs = np.array([np.broadcast_to(self.a(_U_GRID, j), _U_GRID.shape)
                          for j in range(1, self.J + 1)])
        if np.any(coefs < 0):
            raise ConfigError("ARCH coefficients must be non-negative")
        if np.min(self.a0(_U_GRID)) <= 0:
            raise ConfigError("a0(u) must be bounded away from zero")

    def run(self, u, eps):
        Z = np.asarray(eps, dtype=np.float64)
        L = Z.shape[-1]
        uu = np.broadcast_to(np.asarray(u, dtype=float), (L,))
        a0 = np.broadcast_to(self.a0(uu), (L,))
        A = np.array([np.broadcast_to(self.a(uu, j), (L,)) for j in range(1, self.J + 1)])
        x = np.zeros_like(Z)
        sq = np.zeros(Z.shape[:-1] + (self.J,))  # sq[..., j-1] = X_{t-j}^2
        for t in range(L):
            s2 = a0[t] + sq @ A[:, t]
            cur = np.sqrt(s2) * Z[..., t]
            x[..., t] = cur
            sq = np.concatenate([(cur * cur)[..., None], sq[..., :-1]], axis=-1)
        _check_finite(x, self.burn_in)
        return x


def tvarch1(a0: float = 0.5, slope: float = 0.9) -> TvARCHInf:
    """``X_t = sqrt(a0 + slope * (t/T) * X_{t-1}^2) Z_t``."""
    return TvARCHInf(a0=lambda u: a0 * np.ones_like(np.asarray(u, dtype=float)),
                     a=lambda u, j: slope * np.asarray(u, dtype=float), J=1)


@dataclass
class TvGARCH(ProcessModel):
    """tvGARCH(p, q) with coefficient functions ``a0, a_1..a_p, b_1..b_q`` of ``u``."""

    a0: Callable = None
    a: Sequence[Callable] = ()
    b: Sequence[Callable] = ()
    noise: str = "gaussian"
    burn_in: int = BURN_IN

    def __post_init__(self):
        if self.a0 is None:
            raise ConfigError("TvGARCH needs a0(u)")
        total = sum(np.broadcast_to(f(_U_GRID), _U_GRID.shape) for f in (*self.a, *self.b))
        if np.max(total) >= 1.0:
            raise ConfigError(f"sup_u [sum a_j + sum b_j] = {np.max(total):.6g} >= 1")
        if np.min(self.a0(_U_GRID)) <= 0:
            raise ConfigError("a0(u) must be bounded away from zero")

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def unconditional_variance(self, u: float) -> float:
        s = sum(float(f(u)) for f in (*self.a, *self.b))
        return float(self.a0(u)) / (1.0 - s)

    def run(self, u, eps):
        Z = np.asarray(eps, dtype=np.float64)
        L = Z.shape[-1]
        uu = np.broadcast_to(np.asarray(u, dtype=float), (L,))
        a0 = np.broadcast_to(self.a0(uu), (L,))
        A = [np.broadcast_to(f(uu), (L,)) for f in self.a]
        Bc = [np.broadcast_to(f(uu), (L,)) for f in self.b]
        start = self.unconditional_variance(float(uu[0]))
        xs = [np.zeros(Z.shape[:-1]) + start for _ in range(self.p)]   # X_{t-j}^2
        ss = [np.zeros(Z.shape[:-1]) + start for _ in range(self.q)]   # sigma_{t-j}^2
        x = np.zeros_like(Z)
        for t in range(L):
            s2 = a0[t] + sum(A[j][t] * xs[j] for j in range(self.p)) \
                + sum(Bc[j][t] * ss[j] for j in range(self.q))
            cur = np.sqrt(s2) * Z[..., t]
            x[..., t] = cur
            if self.p:
                xs = [cur * cur] + xs[:-1]
            if self.q:
                ss = [s2] + ss[:-1]
        _check_finite(x, self.burn_in)
        return x


@dataclass
class TvARCH0Bootstrap(ProcessModel):
    """``X_t = sigma_t Z_t`` with ``Z_t`` resampled from a residual pool."""

    sigma_path: np.ndarray = None
    residual_pool: np.ndarray = None
    burn_in: int = 0

    def innovations(self, rng, size):
        return rng.choice(self.residual_pool, size=size, replace=True)

    def run(self, u, eps):
        eps = np.asarray(eps, dtype=np.float64)
        L = eps.shape[-1]
        T = self.sigma_path.size
        idx = np.clip(np.rint(np.asarray(u, dtype=float) * T).astype(int), 1, T) - 1
        return np.broadcast_to(self.sigma_path[idx], (L,)) * eps


PRESETS = {
    "tvar2-gauss": lambda: TvAR2(noise="gaussian"),
    "tvar2-cauchy": lambda: TvAR2(noise="cauchy"),
    "tvarch1": tvarch1,
    "tvqar1": TvQAR1,
    "iid-normal": lambda: IID("gaussian"),
    "iid-uniform": lambda: IID("uniform"),
}


def preset(name: str) -> ProcessModel:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown model preset {name!r}; known: {sorted(PRESETS)}") from None


# --------------------------------------------------------------------------
# simulation

def _times(T: int, length: int, burn: int, theta: float | None) -> np.ndarray:
    if theta is not None:
        return np.full(burn + length, float(theta))
    t = np.arange(1, length + 1, dtype=np.float64) / T
    return np.concatenate([np.full(burn, 1.0 / T), t])


def simulate_paths(model: ProcessModel, length: int, seed: int, reps: int | None = None,
                   T: int | None = None, theta: float | None = None,
                   stream_key: int = 0) -> np.ndarray:
    """Simulate ``reps`` independent paths (or one, if ``reps`` is None).

    With ``theta`` set, coefficients are frozen at ``u = theta``; otherwise
    step ``t`` uses ``u = t/T``.  Replication ``r`` draws from the stream
    keyed ``(seed, stream_key, r)``.
    """
    burn = model.burn_in
    u = _times(T if T is not None else length, length, burn, theta)
    if reps is None:
        eps = model.innovations(stream(seed, stream_key, 0), burn + length)
    else:
        eps = np.stack([model.innovations(stream(seed, stream_key, r), burn + length)
                        for r in range(reps)])
    with np.errstate(over="ignore", invalid="ignore"):
        x = model.run(u, eps)
    return x[..., burn:]


def simulate(model: ProcessModel, T: int, seed: int) -> np.ndarray:
    """One row ``X_{1,T}..X_{T,T}`` of the triangular array."""
    if T < 1:
        raise ConfigError(f"T must be >= 1, got {T}")
    return simulate_paths(model, T, seed, T=T)


def simulate_stationary(model: ProcessModel, theta: float, length: int, seed: int) -> np.ndarray:
    """Path of the stationary approximation frozen at rescaled time ``theta``."""
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if not model.time_varying:
        return simulate(model, length, seed)
    return simulate_paths(model, length, seed, theta=theta)


def _bivariate_cdf_distance(a: np.ndarray, b: np.ndarray, grid: int = 50) -> float:
    """Sup distance between empirical bivariate CDFs on a pooled-quantile lattice."""
    levels = (np.arange(grid) + 0.5) / grid
    gx = np.quantile(np.concatenate([a[:, 0], b[:, 0]]), levels)
    gy = np.quantile(np.concatenate([a[:, 1], b[:, 1]]), levels)

    def cdf(s):
        ix = (s[:, 0, None] <= gx[None, :]).astype(np.float64)
        iy = (s[:, 1, None] <= gy[None, :]).astype(np.float64)
        return ix.T @ iy / s.shape[0]

    return float(np.max(np.abs(cdf(a) - cdf(b))))


def lss_distance(model: ProcessModel, theta: float, t: int, T: int, k: int,
                 mc_samples: int, seed: int) -> float:
    """Monte-Carlo Kolmogorov distance between ``(X_{t,T}, X_{t+k,T})`` and the frozen pair.

    The frozen pair is ``(X^theta_s, X^theta_{s+k})``; by stationarity its law
    does not depend on ``s``.
    """
    if mc_samples < 1000:
        raise ConfigError(f"mc_samples must be >= 1000, got {mc_samples}")
    if not 1 <= t <= T or not 1 <= t + k <= T:
        raise DomainError(f"times t={t}, t+k={t + k} must lie in 1..{T}")
    if k < 0:
        t, k = t + k, -k
    arr = simulate_paths(model, t + k, seed, reps=mc_samples, T=T, stream_key=1)
    tri = np.column_stack([arr[:, t - 1], arr[:, t + k - 1]])
    frozen = simulate_paths(model, k + 1, seed, reps=mc_samples, theta=theta, stream_key=2)
    sta = np.column_stack([frozen[:, 0], frozen[:, k]])
    return _bivariate_cdf_distance(tri, sta)


# --------------------------------------------------------------------------
# local variance and tvARCH(0) bootstrap

@dataclass(frozen=True)
class SigmaPath:
    """Local standard deviations ``sigma_t > 0`` and the smoothing half-width used."""

    values: np.ndarray
    halfwidth: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise DomainError("sigma path values must be finite and strictly positive")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


def local_variance(series, halfwidth: int, fixed_divisor: bool = False) -> np.ndarray:
    """Kernel-weighted local variance, before any flooring.

    Weights are ``(4/3) K((s-t)/halfwidth)`` with the Parzen window ``K``;
    deviations are taken from the flat local mean over ``|l - t| <= halfwidth``.
    The weighted sum is divided by the weight sum, or with ``fixed_divisor``
    by ``2*halfwidth + 1`` (edge windows are first rescaled by the clipped weight).
    """
    x = as_series(series)
    T = x.size
    nv = int(halfwidth)
    if nv < 1 or T < 2 * nv + 1:
        raise ConfigError(f"need T >= 2*halfwidth + 1 (T={T}, halfwidth={nv})")
    offs = np.arange(-nv, nv + 1)
    kbar = (4.0 / 3.0) * PARZEN.func(offs / nv)
    full = kbar.sum()
    out = np.empty(T)
    for i in range(T):
        lo, hi = max(0, i - nv), min(T, i + nv + 1)
        seg = x[lo:hi]
        w = kbar[lo - i + nv:hi - i + nv]
        dev2 = (seg - seg.mean()) ** 2
        if fixed_divisor:
            norm = (full / w.sum()) / (2 * nv + 1)
        else:
            norm = 1.0 / w.sum()
        out[i] = norm * np.dot(w, dev2)
    return out


def estimate_local_variance(series, halfwidth: int = 50, fixed_divisor: bool = False) -> SigmaPath:
    """:func:`local_variance` turned into a strictly positive :class:`SigmaPath`."""
    x = as_series(series)
    s2 = local_variance(x, halfwidth, fixed_divisor)
    scale = float(np.max(np.abs(x))) or 1.0
    floor = (np.finfo(np.float64).eps * scale) ** 2
    low = s2 < floor
    if np.any(low):
        warnings.warn(f"local variance is zero at {int(low.sum())} time points; "
                      "flooring sigma at machine epsilon", RuntimeWarning, stacklevel=2)
        s2 = np.where(low, floor, s2)
    return SigmaPath(np.sqrt(s2), int(halfwidth))


def tvarch0_bootstrap(series, sigma_path: SigmaPath | np.ndarray, seed: int,
                      replication: int = 0) -> np.ndarray:
    """``sigma_t * Z_t`` with ``Z_t`` drawn with replacement from ``{x_t / sigma_t}``."""
    x = as_series(series)
    sig = sigma_path.values if isinstance(sigma_path, SigmaPath) else np.asarray(sigma_path, float)
    if sig.shape != x.shape:
        raise ConfigError(f"sigma path length {sig.size} != series length {x.size}")
    if np.any(sig <= 0):
        raise DomainError("sigma path must be strictly positive")
    pool = x / sig
    idx = stream(seed, 3, replication).integers(0, x.size, size=x.size)
    return sig * pool[idx]
