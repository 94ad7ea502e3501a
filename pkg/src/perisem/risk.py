"""Risk computation and empirical verification of the selection procedure.

For a fixed weight sequence the mean integrated squared error has the exact
decomposition

    R(S_hat_gamma, S) = sum_j (1 - gamma(j))^2 theta_j^2
                        + sigma_star * |gamma|^2 / n,

and the selection procedure satisfies a non-asymptotic bound

    R(S_hat_*, S) <= factor(rho) * min_gamma R(S_hat_gamma, S) + additive / n

with factor(rho) = (1 + 3 rho - 2 rho^2) / (1 - 3 rho) and an explicit
additive constant assembled from the noise moments, the family size nu and
the largest support mu.  This module computes both sides: the right side
from closed-form constants, the left side by seeded Monte Carlo over
independent replicates.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .noise import NoiseParams, sigma_star, simulate_coefficient_noise_batch
from .selection import ESTIMATED, KNOWN, SelectionConfig
from .signals import SignalSpec
from .weights import WeightGrid, WeightSequence

DEFAULT_J_TAIL = 512

REPORT_CSV_HEADER = ["n", "rho", "sigma_mode", "oracle_risk", "selected_risk",
                     "se", "factor", "additive", "rhs", "holds"]


# -- closed-form pieces ----------------------------------------------------

def analytic_risk(gamma: WeightSequence, S: SignalSpec, sigma_star_value: float,
                  n: int, j_tail: int = DEFAULT_J_TAIL) -> float:
    """Exact bias^2 + variance of the fixed-weight estimate, truncated at j_tail."""
    support = gamma.support_end
    if j_tail < support:
        raise ValueError("j_tail must cover the weight support")
    theta = S.fourier_coefficients(j_tail)
    g = np.zeros(j_tail)
    g[:support] = gamma.values
    bias = float(np.sum((1.0 - g) ** 2 * theta ** 2))
    return bias + sigma_star_value * gamma.sq_norm / n


def analytic_risk_table(grid: WeightGrid, theta: np.ndarray,
                        sigma_star_value: float, n: int) -> np.ndarray:
    """Analytic risks of every grid member against known coefficients theta.

    Same decomposition as :func:`analytic_risk`, vectorized over the family;
    theta's length sets the tail truncation.
    """
    w, sq_norms, _ = _grid_arrays(grid)
    j_grid = w.shape[1]
    if theta.size < j_grid:
        raise ValueError("theta must cover the grid support")
    head = ((1.0 - w) ** 2) @ (theta[:j_grid] ** 2)
    tail = float(np.sum(theta[j_grid:] ** 2))
    return head + tail + sigma_star_value * sq_norms / n


def tail_remainder_bound(S: SignalSpec, j_tail: int) -> float:
    """Bound 4 |S'|_1^2 / j_tail on the coefficient mass ignored beyond j_tail."""
    return 4.0 * S.sdot_l1() ** 2 / j_tail


def c2_star_bound(noise: NoiseParams) -> float:
    """Uniform-in-n bound 4 sigma* (sigma* + rho2^2 E Y^4) on the quadratic term."""
    s = sigma_star(noise)
    return 4.0 * s * (s + noise.rho2 ** 2 * noise.m4)


def psi_n(rho: float, sigma: float, sigma_star_value: float,
          c1: float, c2: float, nu: int) -> float:
    """(2 sigma sigma* nu + 4 sigma c1 + 2 nu c2) / (sigma rho (1 - 3 rho))."""
    _check_rho(rho)
    return ((2.0 * sigma * sigma_star_value * nu + 4.0 * sigma * c1 + 2.0 * nu * c2)
            / (sigma * rho * (1.0 - 3.0 * rho)))


def kappa_n(S: SignalSpec, sigma: float, sigma_star_value: float,
            c1: float, c2: float, n: int) -> float:
    """Constant controlling E |sigma_hat_n - sigma| * sqrt(n) for smooth signals."""
    sdot = S.sdot_l1()
    return (4.0 * sdot ** 2 + sigma + math.sqrt(c2)
            + 4.0 * sdot * math.sqrt(sigma_star_value) / n ** 0.25
            + c1 / math.sqrt(n))


def oracle_factor(rho: float) -> float:
    """(1 + 3 rho - 2 rho^2) / (1 - 3 rho); > 1 on (0, 1/3), diverging at 1/3."""
    _check_rho(rho)
    return (1.0 + 3.0 * rho - 2.0 * rho ** 2) / (1.0 - 3.0 * rho)


def oracle_bound(rho: float, n: int, mu: int, oracle_risk: float, psi: float,
                 sigma_abs_err_bound: float = 0.0,
                 kappa: Optional[float] = None,
                 variant: str = "direct"):
    """(factor, additive, rhs) of the bound factor * oracle_risk + additive / n.

    variant="direct": additive = psi + 6 mu * sigma_abs_err_bound / (1 - 3 rho)
    (pass 0 for a known sigma, or the bound kappa / sqrt(n) when sigma is
    estimated).  variant="smoothness" folds the sigma_hat error bound for
    differentiable signals into one explicit constant: additive = 2 psi
    + 2 rho (1 - rho) mu kappa / ((1 - 3 rho) sqrt(n)).
    """
    factor = oracle_factor(rho)
    if variant == "direct":
        additive = psi + 6.0 * mu * sigma_abs_err_bound / (1.0 - 3.0 * rho)
    elif variant == "smoothness":
        if kappa is None:
            raise ValueError("variant='smoothness' needs kappa")
        additive = (2.0 * psi
                    + 2.0 * rho * (1.0 - rho) * mu * kappa
                    / ((1.0 - 3.0 * rho) * math.sqrt(n)))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return factor, additive, factor * oracle_risk + additive / n


def _check_rho(rho: float):
    if not 0.0 < rho < 1.0 / 3.0:
        raise ValueError(f"rho must lie in (0, 1/3), got {rho}")


# -- batched selection over simulated replicates ----------------------------

def _grid_arrays(grid: WeightGrid):
    """Dense weight matrix (nu, max_support) plus cached norms of each member."""
    supports = [g.support_end for g in grid.members]
    j_grid = max(supports)
    w = np.zeros((len(grid.members), j_grid))
    for i, g in enumerate(grid.members):
        w[i, :g.support_end] = g.values
    sq_norms = np.array([g.sq_norm for g in grid.members])
    l_sums = np.array([g.l_sum for g in grid.members])
    return w, sq_norms, l_sums


def evaluate_selection_on_estimates(theta_hat: np.ndarray, theta: np.ndarray,
                                    grid: WeightGrid, cfg: SelectionConfig,
                                    n: int):
    """Run the selection rule on a batch of estimate vectors.

    ``theta_hat`` has one replicate per row; ``theta`` holds the true
    coefficients up to the truncation index used for the risk tail.  Grid
    members must be in lexicographic label order (as built by
    :func:`perisem.weights.build_grid`) so that the argmin tie-break matches
    the single-dataset rule.  Returns (per-replicate squared errors,
    chosen member indices, per-replicate sigma values).
    """
    theta_hat = np.atleast_2d(np.asarray(theta_hat, dtype=float))
    theta = np.asarray(theta, dtype=float)
    w, sq_norms, l_sums = _grid_arrays(grid)
    j_grid = w.shape[1]
    if theta_hat.shape[1] < j_grid:
        raise ValueError("estimates do not cover the grid support")
    if theta.size < j_grid:
        raise ValueError("true coefficients do not cover the grid support")

    if cfg.sigma_mode == KNOWN:
        sigma_vec = np.full(theta_hat.shape[0], float(cfg.sigma))
    else:
        if theta_hat.shape[1] < n:
            raise ValueError(f"estimated sigma mode needs coefficients up to "
                             f"j = n = {n}, have {theta_hat.shape[1]}")
        lo = math.isqrt(n) + 1
        sigma_vec = np.sum(theta_hat[:, lo - 1:n] ** 2, axis=1)

    sq = theta_hat[:, :j_grid] ** 2
    sigma_over_n = sigma_vec / n
    costs = (sq @ (w ** 2).T
             - 2.0 * (sq @ w.T - np.outer(sigma_over_n, l_sums))
             + cfg.rho * np.outer(sigma_over_n, sq_norms))
    chosen = np.argmin(costs, axis=1)

    diff = w[chosen] * theta_hat[:, :j_grid] - theta[:j_grid]
    tail = float(np.sum(theta[j_grid:] ** 2))
    risks = np.sum(diff ** 2, axis=1) + tail
    return risks, chosen, sigma_vec


def mise_monte_carlo(S: SignalSpec, noise: NoiseParams, n: int, grid: WeightGrid,
                     cfg: SelectionConfig, replicates: int, seed: int,
                     j_tail: int = DEFAULT_J_TAIL, threads: int = 1):
    """Monte Carlo risk of the selected estimate.

    Simulates coefficient noise per replicate (streams derived from the
    seed), estimates, selects, and measures the squared error exactly in
    coefficient space.  Returns (mean risk, standard error, histogram of the
    chosen grid members).
    """
    if replicates < 100:
        raise ValueError("need at least 100 replicates for a stable estimate")
    j_grid = max(g.support_end for g in grid.members)
    j_tail = max(j_tail, j_grid)
    j_sim = n if cfg.sigma_mode == ESTIMATED else j_grid
    theta_full = S.fourier_coefficients(max(j_tail, j_sim))

    xi = simulate_coefficient_noise_batch(noise, n, j_sim, seed, replicates,
                                          threads=threads)
    theta_hat = theta_full[:j_sim] + xi / math.sqrt(n)
    risks, chosen, _ = evaluate_selection_on_estimates(theta_hat, theta_full[:j_tail],
                                                       grid, cfg, n)
    mean = float(np.mean(risks))
    se = float(np.std(risks, ddof=1) / math.sqrt(replicates))
    hist = np.bincount(chosen, minlength=len(grid.members))
    return mean, se, hist


def sigma_hat_error_mc(S: SignalSpec, noise: NoiseParams, n: int,
                       replicates: int, seed: int, threads: int = 1):
    """Monte Carlo mean of |sigma_hat_n - sigma*| and its standard error."""
    if n < 4:
        raise ValueError("need n >= 4 for sigma_hat")
    theta = S.fourier_coefficients(n)
    xi = simulate_coefficient_noise_batch(noise, n, n, seed, replicates,
                                          threads=threads)
    theta_hat = theta + xi / math.sqrt(n)
    lo = math.isqrt(n) + 1
    sig = np.sum(theta_hat[:, lo - 1:] ** 2, axis=1)
    err = np.abs(sig - sigma_star(noise))
    return float(err.mean()), float(np.std(err, ddof=1) / math.sqrt(replicates))


# -- assembled report -------------------------------------------------------

@dataclass
class OracleReport:
    """All constants and empirical results of one bound verification."""

    n: int
    rho: float
    sigma_mode: str
    per_gamma_risk: list        # [(beta, t, analytic risk), ...] in grid order
    oracle_risk: float
    selected_risk: float
    selected_se: float
    chosen_histogram: list
    constants: dict
    factor: float
    additive: float
    rhs: float
    holds: bool
    replicates: int
    seed: int

    def csv_row(self) -> list:
        return [self.n, format(self.rho, ".17g"), self.sigma_mode,
                format(self.oracle_risk, ".17g"), format(self.selected_risk, ".17g"),
                format(self.selected_se, ".17g"), format(self.factor, ".17g"),
                format(self.additive, ".17g"), format(self.rhs, ".17g"),
                "true" if self.holds else "false"]

    def to_json(self) -> str:
        payload = {
            "n": self.n, "rho": self.rho, "sigma_mode": self.sigma_mode,
            "oracle_risk": self.oracle_risk,
            "selected_risk": self.selected_risk,
            "selected_se": self.selected_se,
            "factor": self.factor, "additive": self.additive,
            "rhs": self.rhs, "holds": self.holds,
            "replicates": self.replicates, "seed": self.seed,
            "constants": self.constants,
            "chosen_histogram": list(map(int, self.chosen_histogram)),
            "per_gamma_risk": [
                {"beta": b, "t": t, "risk": r} for b, t, r in self.per_gamma_risk
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def verify_oracle(S: SignalSpec, noise: NoiseParams, n: int, grid: WeightGrid,
                  cfg: SelectionConfig, replicates: int, seed: int,
                  j_tail: int = DEFAULT_J_TAIL, threads: int = 1) -> OracleReport:
    """Assemble constants, run the Monte Carlo, and check the bound.

    The bound constants are instantiated for the Brownian-plus-compound-
    Poisson noise: sigma = sigma*, c1* = 0 and c2* replaced by its uniform
    bound.  In estimated-sigma mode the unobservable E|sigma_hat - sigma| is
    replaced by its proven bound kappa_n(S) / sqrt(n); with a known sigma the
    term is |sigma_known - sigma*| (zero when the supplied value is exact).
    """
    s_star = sigma_star(noise)
    c2b = c2_star_bound(noise)
    j_grid = max(g.support_end for g in grid.members)
    j_tail = max(j_tail, j_grid)

    theta = S.fourier_coefficients(j_tail)
    risks = analytic_risk_table(grid, theta, s_star, n)
    table = [(g.label[0], g.label[1], float(r))
             for g, r in zip(grid.members, risks)]
    oracle_risk = float(risks.min())

    mc_mean, mc_se, hist = mise_monte_carlo(S, noise, n, grid, cfg, replicates,
                                            seed, j_tail=j_tail, threads=threads)

    psi = psi_n(cfg.rho, s_star, s_star, 0.0, c2b, grid.nu)
    try:
        kappa = kappa_n(S, s_star, s_star, 0.0, c2b, n)
    except ValueError:
        kappa = None

    if cfg.sigma_mode == KNOWN:
        sigma_err_bound = abs(float(cfg.sigma) - s_star)
    else:
        if kappa is None:
            raise ValueError("estimated sigma mode needs a differentiable signal "
                             "to bound the sigma_hat error")
        sigma_err_bound = kappa / math.sqrt(n)

    factor, additive, rhs = oracle_bound(cfg.rho, n, grid.mu, oracle_risk, psi,
                                         sigma_abs_err_bound=sigma_err_bound)
    d_n = None
    if kappa is not None:
        _, d_n, _ = oracle_bound(cfg.rho, n, grid.mu, oracle_risk, psi,
                                 kappa=kappa, variant="smoothness")

    constants = {
        "sigma": s_star, "sigma_star": s_star,
        "c1_star": 0.0, "c2_star_bound": c2b,
        "psi_n": psi, "kappa_n": kappa,
        "b_star_n": additive, "d_n": d_n,
        "mu": grid.mu, "nu": grid.nu,
        "sigma_err_bound": sigma_err_bound,
    }
    holds = bool(mc_mean - 2.0 * mc_se <= rhs)
    return OracleReport(n=n, rho=cfg.rho, sigma_mode=cfg.sigma_mode,
                        per_gamma_risk=table, oracle_risk=oracle_risk,
                        selected_risk=mc_mean, selected_se=mc_se,
                        chosen_histogram=list(map(int, hist)),
                        constants=constants, factor=factor, additive=additive,
                        rhs=rhs, holds=holds, replicates=replicates, seed=seed)


def write_report_csv(reports, path):
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_CSV_HEADER)
        for rep in reports:
            writer.writerow(rep.csv_row())


def report_csv_text(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(REPORT_CSV_HEADER)
    for rep in reports:
        writer.writerow(rep.csv_row())
    return buf.getvalue()
