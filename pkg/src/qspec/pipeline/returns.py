"""Bootstrap-matching workflow for a price series.

Log-returns are estimated on a sliding-window grid, a kernel-smoothed local
volatility path is fitted, ``J`` volatility-only (tvARCH(0)) bootstrap
series are drawn and estimated with the same plan, and the bootstrap whose
field is closest to the data field is reported.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analysis import best_match
from ..core import EstimationPlan, SpectralField
from ..estimator import sweep
from ..models import SigmaPath, estimate_local_variance, tvarch0_bootstrap
from .io import log_returns

MATCH_SELECTOR = ((0.1, 0.1, "re"), (0.9, 0.9, "re"), (0.9, 0.1, "im"))


@dataclass(frozen=True)
class ReturnsResult:
    returns: np.ndarray
    sigma: SigmaPath
    field: SpectralField
    bootstraps: list
    fields: list
    best_index: int
    best_distance: float
    distances: list

    @property
    def best_series(self) -> np.ndarray:
        return self.bootstraps[self.best_index - 1]


def bootstrap_series(returns, sigma: SigmaPath, J: int, seed: int) -> list:
    return [tvarch0_bootstrap(returns, sigma, seed, replication=j) for j in range(J)]


def returns_workflow(prices, plan_for, J: int, seed: int, halfwidth: int = 50,
                     fixed_divisor: bool = False, candidates=None,
                     selector=MATCH_SELECTOR) -> ReturnsResult:
    """Run the full workflow.

    ``plan_for(T)`` builds the estimation plan once the return length is
    known.  ``candidates``, if given, replaces the bootstrap fields (their
    series are then left empty).
    """
    r = log_returns(prices)
    sigma = estimate_local_variance(r, halfwidth, fixed_divisor)
    plan: EstimationPlan = plan_for(r.size)
    field = sweep(r, plan)
    if candidates is None:
        boots = bootstrap_series(r, sigma, J, seed)
        fields = [sweep(b, plan) for b in boots]
    else:
        boots, fields = [], list(candidates)
    idx, dist, dists = best_match(field, fields, selector)
    return ReturnsResult(r, sigma, field, boots, fields, idx, dist, dists)
