"""Local quantiles and the local lag-window copula spectral estimator.

The estimator at window centre ``t0`` and Fourier frequency ``omega`` is

    f(omega; a, b) = 1/(2 pi) * sum_{|k| < n} K(k/B) exp(-i omega k) g_k(a, b)

with ``g_k(a, b) = 1/n * sum_t (1{x_t <= q_a} - tau_a)(1{x_{t+k} <= q_b} - tau_b)``
summed over pairs ``(t, t+k)`` inside the window, and ``q_a`` the local
empirical quantile of order ``tau_a``.  Since ``g_{-k}(a, b) = g_k(b, a)``
the sum is evaluated over ``k >= 0`` only:

    Re f = 1/(2 pi) [K(0) g_0(a,b) + sum_{k>0} K(k/B) (g_k(a,b) + g_k(b,a)) cos(omega k)]
    Im f = 1/(2 pi)  sum_{k>0} K(k/B) (g_k(b,a) - g_k(a,b)) sin(omega k)

which makes ``f(b, a) == conj(f(a, b))`` hold bit-for-bit and ``Im f(a, a)``
vanish identically.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import (EstimationPlan, SpectralField, as_series, check_window, fourier_snap,
                   neighborhood)
from .errors import BoundaryError, ConfigError, DomainError
from .rng import pmap

__all__ = [
    "local_ecdf",
    "local_quantile",
    "local_quantiles",
    "indicator_ccov",
    "lag_window_estimate",
    "sweep",
    "window_spectra",
    "LagTable",
]

_TWO_PI = 2.0 * math.pi


def _quantile_window(x: np.ndarray, t0: int, h_q: int) -> np.ndarray:
    T = x.size
    if not 1 <= t0 <= T:
        raise BoundaryError(f"t0={t0} outside 1..{T}")
    if h_q < 1:
        raise ConfigError(f"quantile half-width must be >= 1, got {h_q}")
    lo, hi = max(1, t0 - h_q), min(T, t0 + h_q)
    return x[lo - 1:hi]


def order_rank(tau: float, count: int) -> int:
    """``ceil(tau * count)`` evaluated on the decimal value of ``tau``."""
    return max(1, math.ceil(Fraction(repr(float(tau))) * count))


def local_ecdf(series, t0: int, h_q: int, x: float) -> float:
    """Empirical CDF at ``x`` of the observations with ``|t - t0| <= h_q``."""
    w = _quantile_window(as_series(series), t0, h_q)
    return np.count_nonzero(w <= x) / w.size


def local_quantiles(series, t0: int, h_q: int, taus) -> np.ndarray:
    w = np.sort(_quantile_window(as_series(series), t0, h_q))
    out = []
    for tau in taus:
        if not 0.0 < tau < 1.0:
            raise DomainError(f"quantile level {tau} outside (0, 1)")
        out.append(w[order_rank(tau, w.size) - 1])
    return np.array(out)


def local_quantile(series, t0: int, h_q: int, tau: float) -> float:
    """Generalized inverse of :func:`local_ecdf`: the ``ceil(tau*c)``-th order statistic."""
    return float(local_quantiles(series, t0, h_q, [tau])[0])


def indicator_ccov(series, nbhd, k: int, q1: float, q2: float, tau1: float, tau2: float) -> float:
    """Lag-``k`` cross-covariance of centred quantile indicators, divided by ``n = |nbhd|``."""
    x = as_series(series)
    idx = np.asarray(list(nbhd), dtype=np.int64)
    n = idx.size
    if abs(k) > n - 1:
        return 0.0
    a = (x[idx - 1] <= q1) - tau1
    b = (x[idx - 1] <= q2) - tau2
    if k >= 0:
        return float(np.dot(a[:n - k], b[k:]) / n)
    return float(np.dot(a[-k:], b[:n + k]) / n)


class LagTable:
    """Non-zero lag weights ``K(k/B)`` (``k >= 0``) and trig tables for a frequency set."""

    def __init__(self, kernel, bandwidth: float, n: int, freqs):
        w = kernel.lag_weights(bandwidth, n - 1)
        self.lags = np.flatnonzero(w)
        self.weights = w[self.lags]
        self.freqs = np.asarray(freqs, dtype=np.float64)
        self.n = n
        pos = self.lags > 0
        arg = np.outer(self.freqs, self.lags[pos].astype(np.float64))
        # direct evaluation; no angle-addition recurrences
        self.wcos = np.cos(arg) * self.weights[pos]
        self.wsin = np.sin(arg) * self.weights[pos]
        self.w0 = float(self.weights[0]) if self.lags.size and self.lags[0] == 0 else 0.0

    @classmethod
    def for_plan(cls, plan: EstimationPlan, freqs=None):
        if freqs is None:
            freqs = plan.freq_grid.frequencies
        return cls(plan.kernel, plan.bandwidth, plan.n, freqs)


def window_spectra(windows: np.ndarray, qhat: np.ndarray, taus, table: LagTable) -> np.ndarray:
    """Estimator on a batch of windows.

    Parameters
    ----------
    windows : (R, n) array
        One estimation window per row.
    qhat : (R, nq) array
        Local quantile estimates per window and level.
    taus : sequence of nq floats
    table : LagTable

    Returns
    -------
    (R, n_freq, nq, nq) complex array
    """
    windows = np.atleast_2d(windows)
    R, n = windows.shape
    taus = np.asarray(taus, dtype=np.float64)
    nq = taus.size
    ind = (windows[:, :, None] <= qhat[:, None, :]) - taus[None, None, :]
    ind_t = ind.transpose(0, 2, 1)

    g0 = np.zeros((R, nq, nq))
    pos_lags = table.lags[table.lags > 0]
    sym = np.empty((R, pos_lags.size, nq, nq))
    dif = np.empty((R, pos_lags.size, nq, nq))
    if table.w0:
        g0 = (ind_t @ ind) / n
    for i, k in enumerate(pos_lags):
        g = (ind_t[:, :, :n - k] @ ind[:, k:, :]) / n
        gt = g.transpose(0, 2, 1)
        sym[:, i] = g + gt
        dif[:, i] = gt - g

    re = np.einsum("wk,rkab->rwab", table.wcos, sym) + (table.w0 * g0)[:, None, :, :]
    im = np.einsum("wk,rkab->rwab", table.wsin, dif)
    re /= _TWO_PI
    im /= _TWO_PI
    diag = np.arange(nq)
    im[:, :, diag, diag] = 0.0
    out = re + 1j * im
    # mirror the upper triangle so the Hermitian relation is exact by construction
    iu, ju = np.triu_indices(nq, 1)
    out[:, :, ju, iu] = np.conj(out[:, :, iu, ju])
    return out


def _window_inputs(x: np.ndarray, t0s, n: int, h_q: int, taus):
    starts = np.asarray(t0s, dtype=np.int64) - n // 2
    windows = np.stack([x[s:s + n] for s in starts])
    qhat = np.stack([local_quantiles(x, int(t0), h_q, taus) for t0 in t0s])
    return windows, qhat


def lag_window_estimate(series, t0: int, plan: EstimationPlan, tau1: float, tau2: float,
                        omega: float) -> complex:
    """Estimator at one ``(t0, omega, tau1, tau2)``; ``omega`` is snapped to the Fourier grid."""
    x = as_series(series)
    neighborhood(t0, plan.n, x.size)
    w = fourier_snap(omega, plan.n)
    taus = (float(tau1), float(tau2))
    windows, qhat = _window_inputs(x, [t0], plan.n, plan.quantile_halfwidth, taus)
    table = LagTable(plan.kernel, plan.bandwidth, plan.n, [w])
    return complex(window_spectra(windows, qhat, taus, table)[0, 0, 0, 1])


def sweep(series, plan: EstimationPlan, chunk: int = 64) -> SpectralField:
    """Estimator over the full ``t0 x frequency x quantile x quantile`` grid of ``plan``."""
    x = as_series(series)
    if x.size != plan.T:
        raise ConfigError(f"series has length {x.size} but plan expects T={plan.T}")
    for t0 in plan.t0_grid:
        try:
            check_window(t0, plan.n, x.size)
        except BoundaryError as exc:
            raise BoundaryError(f"sweep aborted at t0={t0}: {exc}") from None
    table = LagTable.for_plan(plan)
    t0s = list(plan.t0_grid)
    blocks = [t0s[i:i + chunk] for i in range(0, len(t0s), chunk)]

    def run(block):
        windows, qhat = _window_inputs(x, block, plan.n, plan.quantile_halfwidth, plan.quantiles)
        return window_spectra(windows, qhat, plan.quantiles, table)

    values = np.concatenate(pmap(run, blocks), axis=0)
    return SpectralField.from_plan(values, plan)
