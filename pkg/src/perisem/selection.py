"""Penalized model selection over a family of weighted least-squares estimates.

For each candidate weight sequence gamma the cost is

    J_n(gamma) = sum_j gamma(j)^2 theta_hat_j^2
                 - 2 sum_j gamma(j) (theta_hat_j^2 - sigma_used / n)
                 + rho * sigma_used * |gamma|^2 / n

and the procedure picks the cost minimizer over the grid (ties broken by the
lexicographically smallest (beta, t) label, which makes the choice
reproducible).  sigma_used is either a known noise intensity or the estimate

    sigma_hat_n = sum_{j = floor(sqrt(n)) + 1}^{n} theta_hat_j^2,

which requires the full coefficient vector up to j = n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .estimator import CoefficientEstimates, weighted_estimate
from .weights import WeightGrid, WeightSequence

KNOWN = "known"
ESTIMATED = "estimated"


@dataclass(frozen=True)
class SelectionConfig:
    """Penalty factor rho in (0, 1/3) and the sigma mode (known value or estimated)."""

    rho: float = 0.1
    sigma_mode: str = ESTIMATED
    sigma: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0 / 3.0:
            raise ValueError(f"rho must lie in (0, 1/3), got {self.rho}")
        if self.sigma_mode not in (KNOWN, ESTIMATED):
            raise ValueError(f"sigma_mode must be {KNOWN!r} or {ESTIMATED!r}")
        if self.sigma_mode == KNOWN:
            if self.sigma is None or not self.sigma > 0.0:
                raise ValueError("known sigma mode needs sigma > 0")
        elif self.sigma is not None:
            raise ValueError("sigma is only meaningful in known mode")


@dataclass
class SelectionResult:
    """Outcome of one selection: chosen weights, the full cost table, the estimate."""

    chosen: WeightSequence
    cost_table: list           # [(beta, t, cost), ...] in grid order
    sigma_used: float
    estimate: object           # coefficient-form SignalSpec

    def to_json(self) -> str:
        beta, t = self.chosen.label
        payload = {
            "chosen": {"beta": beta, "t": t},
            "sigma_used": self.sigma_used,
            "cost_table": [
                {"beta": b, "t": tv, "cost": c} for b, tv, c in self.cost_table
            ],
            "estimate_coefficients": list(self.estimate.coefficients),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def sigma_hat(est: CoefficientEstimates) -> float:
    """Tail-energy estimate of the noise intensity: sum of theta_hat_j^2, j > sqrt(n)."""
    if est.n < 4:
        raise ValueError(f"horizon too small for sigma_hat: need n >= 4, got {est.n}")
    if est.j_max < est.n:
        raise ValueError(f"sigma_hat needs coefficients up to j = n = {est.n}, "
                         f"have {est.j_max}")
    lo = math.isqrt(est.n) + 1
    return float(np.sum(est.values[lo - 1:est.n] ** 2))


def theta_tilde(est: CoefficientEstimates, sigma_used: float) -> np.ndarray:
    """Bias-corrected squared coefficients theta_hat_j^2 - sigma_used / n."""
    if sigma_used < 0.0:
        raise ValueError("sigma_used must be nonnegative")
    return est.values ** 2 - sigma_used / est.n


def penalty(gamma: WeightSequence, n: int, sigma_used: float) -> float:
    """sigma_used * |gamma|^2 / n."""
    if sigma_used < 0.0:
        raise ValueError("sigma_used must be nonnegative")
    return sigma_used * gamma.sq_norm / n


def cost(gamma: WeightSequence, est: CoefficientEstimates,
         cfg: SelectionConfig, sigma_used: float) -> float:
    """J_n(gamma); all sums run over gamma's support."""
    support = gamma.support_end
    if support > est.j_max:
        raise ValueError(f"weight support {support} exceeds the estimate budget "
                         f"j_max={est.j_max}")
    g = gamma.values
    th2 = est.values[:support] ** 2
    quad = float(np.sum(g ** 2 * th2))
    # sum_j gamma theta_tilde = sum gamma theta_hat^2 - (sigma/n) L(gamma)
    cross = float(np.sum(g * th2)) - sigma_used / est.n * gamma.l_sum
    return quad - 2.0 * cross + cfg.rho * penalty(gamma, est.n, sigma_used)


def resolve_sigma(est: CoefficientEstimates, cfg: SelectionConfig) -> float:
    """The sigma fed to both the correction term and the penalty."""
    if cfg.sigma_mode == KNOWN:
        return float(cfg.sigma)
    return sigma_hat(est)


def select(est: CoefficientEstimates, grid: WeightGrid,
           cfg: SelectionConfig) -> SelectionResult:
    """Evaluate J_n on every grid member and return the (tie-broken) argmin."""
    if not grid.members:
        raise ValueError("weight grid is empty")
    sigma_used = resolve_sigma(est, cfg)
    table = []
    best_idx = 0
    best_cost = np.inf
    best_label = None
    for idx, gamma in enumerate(grid.members):
        c = cost(gamma, est, cfg, sigma_used)
        beta, t = gamma.label
        table.append((beta, t, c))
        # ties go to the lexicographically smallest label, not encounter order
        if (best_label is None or c < best_cost
                or (c == best_cost and (beta, t) < best_label)):
            best_cost = c
            best_idx = idx
            best_label = (beta, t)
    chosen = grid.members[best_idx]
    return SelectionResult(chosen=chosen, cost_table=table, sigma_used=sigma_used,
                           estimate=weighted_estimate(chosen, est))
