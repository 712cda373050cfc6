"""Reference quantities for judging the estimator.

Analytic white-noise spectra, simulated ground truth from frozen stationary
approximations, Wigner-Ville indicator spectra, kernel constants, the
bandwidth calculator and distances between spectral fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import EstimationPlan, LagWindow, SpectralField
from .errors import ConfigError, DomainError
from .estimator import LagTable, order_rank, window_spectra
from .models import ProcessModel, simulate_paths
from .rng import pmap

__all__ = [
    "theoretical_iid_spectrum",
    "ground_truth",
    "GroundTruth",
    "iid_indicator_cov",
    "MCIndicatorCov",
    "wigner_ville",
    "characteristic_constant",
    "characteristic_exponent",
    "kernel_l2",
    "BandwidthInputs",
    "optimal_parameters",
    "asymptotic_mse",
    "field_l2_distance",
    "best_match",
]


def theoretical_iid_spectrum(tau1: float, tau2: float) -> float:
    """Copula spectral density of an i.i.d. sequence: ``(min(t1, t2) - t1 t2) / (2 pi)``."""
    for t in (tau1, tau2):
        if not 0.0 < t < 1.0:
            raise DomainError(f"quantile level {t} outside (0, 1)")
    return (min(tau1, tau2) - tau1 * tau2) / (2.0 * math.pi)


# --------------------------------------------------------------------------
# ground truth by simulation

@dataclass(frozen=True)
class GroundTruth:
    field: SpectralField
    stderr_re: np.ndarray
    stderr_im: np.ndarray


def _centred_windows(paths: np.ndarray, n: int, h_q: int, taus) -> tuple[np.ndarray, np.ndarray]:
    c = paths.shape[1] // 2
    windows = paths[:, c - n // 2:c + n // 2]
    qwin = np.sort(paths[:, c - h_q - 1:c + h_q], axis=1)
    rank = [order_rank(t, 2 * h_q + 1) - 1 for t in taus]
    return windows, qwin[:, rank]


def ground_truth(model: ProcessModel, plan: EstimationPlan, R: int = 200, length: int = 2048,
                 seed: int = 0, with_stderr: bool = False):
    """Average the estimator over ``R`` stationary-approximation paths per window centre.

    For every ``t0`` in ``plan.t0_grid`` the model is frozen at
    ``theta = t0 / plan.T``; each path has ``length`` observations and is
    estimated on its central window of ``plan.n`` observations.
    """
    if R < 2:
        raise ConfigError(f"ground truth needs R >= 2 replications, got {R}")
    if length < plan.n:
        raise ConfigError(f"path length {length} shorter than window length {plan.n}")
    table = LagTable.for_plan(plan)
    h_q = plan.quantile_halfwidth

    def run(t0):
        theta = t0 / plan.T
        try:
            paths = simulate_paths(model, length, seed, reps=R, theta=theta, stream_key=int(t0))
        except ArithmeticError as exc:
            raise type(exc)(f"theta={theta}: {exc}") from exc
        windows, qhat = _centred_windows(paths, plan.n, h_q, plan.quantiles)
        est = window_spectra(windows, qhat, plan.quantiles, table)
        se_re = est.real.std(axis=0, ddof=1) / math.sqrt(R)
        se_im = est.imag.std(axis=0, ddof=1) / math.sqrt(R)
        return est.mean(axis=0), se_re, se_im

    res = pmap(run, plan.t0_grid)
    values = np.stack([r[0] for r in res])
    nq = len(plan.quantiles)
    diag = np.arange(nq)
    values.imag[:, :, diag, diag] = 0.0
    iu, ju = np.triu_indices(nq, 1)
    values[:, :, ju, iu] = np.conj(values[:, :, iu, ju])
    field = SpectralField.from_plan(values, plan)
    if not with_stderr:
        return field
    return GroundTruth(field, np.stack([r[1] for r in res]), np.stack([r[2] for r in res]))


# --------------------------------------------------------------------------
# Wigner-Ville indicator spectrum

def iid_indicator_cov(s: int, t0: int, tau1: float, tau2: float) -> float:
    """Indicator covariance oracle of an i.i.d. sequence."""
    return (min(tau1, tau2) - tau1 * tau2) if s == 0 else 0.0


class MCIndicatorCov:
    """Monte-Carlo oracle for ``Cov(1{X_a <= F_a^-1(tau1)}, 1{X_b <= F_b^-1(tau2)})``.

    ``a = floor(t0 + s/2)`` and ``b = floor(t0 - s/2)``; marginal quantiles
    at each time are estimated by pooling the replications of the triangular
    array at that time.
    """

    def __init__(self, model: ProcessModel, T: int, reps: int = 2000, seed: int = 0,
                 horizon: int | None = None):
        self.T = T
        self.paths = simulate_paths(model, horizon or T, seed, reps=reps, T=T, stream_key=7)

    def _indicator(self, t: int, tau: float) -> np.ndarray:
        col = self.paths[:, t - 1]
        q = np.sort(col)[order_rank(tau, col.size) - 1]
        return (col <= q).astype(np.float64)

    def __call__(self, s: int, t0: int, tau1: float, tau2: float) -> float:
        a, b = (2 * t0 + s) // 2, (2 * t0 - s) // 2
        if not (1 <= a <= self.paths.shape[1] and 1 <= b <= self.paths.shape[1]):
            raise DomainError(f"lag s={s} at t0={t0} leaves the simulated horizon")
        ia, ib = self._indicator(a, tau1), self._indicator(b, tau2)
        return float(np.mean(ia * ib) - ia.mean() * ib.mean())


def wigner_ville(cov, t0: int, S: int, omega: float, tau1: float, tau2: float) -> complex:
    """``1/(2 pi) * sum_{|s| <= S} cov(s) exp(-i omega s)``.

    ``cov(s, t0, tau1, tau2)`` is an indicator covariance oracle such as
    :func:`iid_indicator_cov` or an :class:`MCIndicatorCov` instance.
    """
    if S < 0:
        raise ConfigError(f"truncation S must be >= 0, got {S}")
    s = np.arange(-S, S + 1)
    c = np.array([cov(int(k), t0, tau1, tau2) for k in s])
    return complex(np.sum(c * np.exp(-1j * omega * s)) / (2.0 * math.pi))


# --------------------------------------------------------------------------
# kernel constants

def characteristic_constant(kernel: LagWindow, r: int, h: float = 1e-2, levels: int = 6) -> float:
    """``lim_{u->0} (1 - K(u)) / |u|^r`` by Richardson extrapolation on ``h, h/2, h/4, ...``."""
    g = [(1.0 - kernel(h / 2**i)) / (h / 2**i) ** r for i in range(levels)]
    table = [g]
    for p in range(1, levels):
        prev = table[-1]
        table.append([(2**p * prev[i + 1] - prev[i]) / (2**p - 1) for i in range(len(prev) - 1)])
    return float(table[-1][0])


def characteristic_exponent(kernel: LagWindow, max_r: int = 6) -> int:
    """Largest ``r`` with a finite non-zero limit constant."""
    found = None
    for r in range(1, max_r + 1):
        c = characteristic_constant(kernel, r, levels=4)
        small = characteristic_constant(kernel, r, h=1e-3, levels=4)
        if abs(c) > 1e-6 and math.isclose(c, small, rel_tol=1e-3):
            found = r
    if found is None:
        raise DomainError(f"no characteristic exponent found for kernel {kernel.name}")
    return found


def kernel_l2(kernel: LagWindow) -> float:
    """``integral of K(u)^2 over [-1, 1]`` by adaptive quadrature."""
    val, _ = integrate.quad(lambda u: kernel(u) ** 2, -1.0, 1.0, points=[-0.5, 0.0, 0.5],
                            epsabs=1e-14, epsrel=1e-13)
    return float(val)


# --------------------------------------------------------------------------
# bandwidth calculator

@dataclass(frozen=True)
class BandwidthInputs:
    """Constants of the asymptotic MSE: variance, time bias, frequency bias."""

    sigma2: float
    b_u: float
    b_omega: float
    r: int
    T: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ConfigError(f"sigma2 must be positive, got {self.sigma2}")
        if self.r < 1:
            raise ConfigError(f"characteristic exponent must be >= 1, got {self.r}")
        if self.T < 2:
            raise ConfigError(f"T must be >= 2, got {self.T}")


def optimal_parameters(inputs: BandwidthInputs) -> tuple[float, float]:
    """Closed-form window length and bandwidth ``(n, B_n)``, unrounded."""
    s2, bu, bw, r, T = inputs.sigma2, inputs.b_u, inputs.b_omega, inputs.r, inputs.T
    if bu <= 0 or bw <= 0:
        raise DomainError(f"b_u and b_omega must be positive (got {bu}, {bw})")
    d = 2.0 + 5.0 * r
    n = T ** (1.0 - r / d) * (
        s2 * bw ** (-1.0 / r) * bu ** (2.0 + 1.0 / r) * (2 * r + 4) * (r / 2.0) ** (-r / (r + 1.0))
    ) ** (r / d)
    B = T ** (2.0 / d) * (s2 ** -1.0 * bu ** -0.5 * bw ** 2.5 * (2 * r + 4)) ** (2.0 / d) \
        * (2.0 / r) ** (-3.0 / d)
    return float(n), float(B)


def asymptotic_mse(n: float, B: float, inputs: BandwidthInputs, squared_bias: bool = False) -> float:
    """``(B/n) sigma2 + b_u n^2/T^2 + b_omega B^-r``.

    With ``squared_bias=True`` the bias terms enter squared,
    ``b_u^2 n^4/T^4 + b_omega^2 B^-2r``.
    """
    if n <= 0 or B <= 0:
        raise DomainError(f"n and B must be positive (got {n}, {B})")
    T, r = inputs.T, inputs.r
    var = B / n * inputs.sigma2
    if squared_bias:
        return var + (inputs.b_u * n**2 / T**2) ** 2 + (inputs.b_omega * B ** (-r)) ** 2
    return var + inputs.b_u * n**2 / T**2 + inputs.b_omega * B ** (-r)


# --------------------------------------------------------------------------
# field distances

def field_l2_distance(a: SpectralField, b: SpectralField, selector) -> float:
    """Sum over selected ``(tau1, tau2, part)``, ``t0`` and frequency of squared differences."""
    if not a.same_grid(b):
        raise ConfigError("fields are defined on different grids")
    total = 0.0
    for t1, t2, part in selector:
        d = a.component(t1, t2, part) - b.component(t1, t2, part)
        total += float(np.sum(d * d))
    return total


def best_match(target: SpectralField, candidates, selector) -> tuple[int, float, list[float]]:
    """1-based index and distance of the candidate closest to ``target``; ties keep the first."""
    dists = [field_l2_distance(c, target, selector) for c in candidates]
    if not dists:
        raise ConfigError("no candidate fields")
    j = int(np.argmin(dists))
    return j + 1, dists[j], dists
