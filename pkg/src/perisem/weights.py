"""Polynomially tapered (Pinsker-type) shrinkage weights and their grid.

For a label alpha = (beta, t) and horizon n the weight sequence is

    gamma_alpha(j) = 1                          for 1 <= j <= j0,
                     1 - (j / omega)**beta      for j0 < j <= omega,
                     0                          otherwise,

with omega = (tau_beta * t * n)**(1 / (2*beta + 1)),
tau_beta = (beta + 1) * (2*beta + 1) / (pi**(2*beta) * beta) and
j0 = floor(omega / ln n).  The grid runs beta over {1, .., k_star} and t over
{eps, 2*eps, ..., m*eps} with m = floor(1 / eps**2); the defaults
eps(n) = 1 / ln(n + 1) and k_star(n) = ceil(sqrt(ln(n + 1))) slowly enlarge
the family as the horizon grows.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

log = logging.getLogger(__name__)


@dataclass(eq=False)
class WeightSequence:
    """A finite weight sequence gamma(j), j = 1..support_end, values in [0, 1]."""

    values: np.ndarray
    label: Optional[tuple] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("weights must form a 1-d sequence")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("weights must lie in [0, 1]")

    @property
    def support_end(self) -> int:
        return self.values.size

    def weight(self, j: int) -> float:
        """gamma(j) with gamma = 0 beyond the stored support."""
        if j < 1:
            raise ValueError("index must be >= 1")
        return float(self.values[j - 1]) if j <= self.values.size else 0.0

    @cached_property
    def count(self) -> int:
        """#(gamma): number of nonzero weights."""
        return int(np.count_nonzero(self.values))

    @cached_property
    def sq_norm(self) -> float:
        """|gamma|^2 = sum gamma(j)^2."""
        return float(np.sum(self.values ** 2))

    @cached_property
    def l_sum(self) -> float:
        """L(gamma) = sum gamma(j)."""
        return float(np.sum(self.values))


def weight_summaries(g: WeightSequence):
    """(#(gamma), |gamma|^2, L(gamma)) over the finite support."""
    return g.count, g.sq_norm, g.l_sum


def tau_beta(beta: int) -> float:
    """(beta + 1) * (2*beta + 1) / (pi**(2*beta) * beta)."""
    if beta < 1:
        raise ValueError("beta must be >= 1")
    return (beta + 1.0) * (2.0 * beta + 1.0) / (np.pi ** (2.0 * beta) * beta)


def omega_alpha(beta: int, t: float, n: int) -> float:
    """Support cutoff (tau_beta * t * n)**(1 / (2*beta + 1))."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    return float((tau_beta(beta) * t * n) ** (1.0 / (2.0 * beta + 1.0)))


def pinsker_j0(beta: int, t: float, n: int) -> int:
    """Flat-head length floor(omega / ln n); requires n >= 2 so ln n > 0."""
    if n < 2:
        raise ValueError("horizon too small: need n >= 2")
    return int(omega_alpha(beta, t, n) / math.log(n))


def pinsker_weight(alpha: tuple, n: int, j: int) -> float:
    """gamma_alpha(j) for alpha = (beta, t); zero outside 1 <= j <= omega."""
    beta, t = alpha
    if j < 1:
        raise ValueError("index must be >= 1")
    omega = omega_alpha(beta, t, n)
    j0 = pinsker_j0(beta, t, n)
    if j > omega:
        return 0.0
    if j <= j0:
        return 1.0
    return 1.0 - (j / omega) ** beta


def pinsker_sequence(alpha: tuple, n: int) -> WeightSequence:
    """The full weight vector of one grid member, truncated to support <= n."""
    beta, t = alpha
    omega = omega_alpha(beta, t, n)
    j0 = pinsker_j0(beta, t, n)
    support = min(int(omega), n)
    j = np.arange(1, support + 1, dtype=float)
    values = np.where(j <= j0, 1.0, 1.0 - (j / omega) ** beta)
    values = np.clip(values, 0.0, 1.0)
    while values.size and values[-1] == 0.0:
        values = values[:-1]
    return WeightSequence(values, label=(int(beta), float(t)))


@dataclass
class WeightGrid:
    """The finite family Gamma of weight sequences, in lexicographic label order."""

    n: int
    k_star: int
    epsilon: float
    members: list = field(default_factory=list)
    dropped: list = field(default_factory=list)

    @property
    def m(self) -> int:
        return int(1.0 / self.epsilon ** 2)

    @property
    def nu(self) -> int:
        """Cardinal number of the family (k_star * m when nothing was dropped)."""
        return len(self.members)

    @property
    def mu(self) -> int:
        """Largest effective support max_gamma #(gamma)."""
        return max((g.count for g in self.members), default=0)

    @property
    def labels(self):
        return [g.label for g in self.members]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh)
            writer.writerow(["beta", "t", "omega", "j0", "support", "sq_norm"])
            for g in self.members:
                beta, t = g.label
                writer.writerow([beta, format(t, ".17g"),
                                 format(omega_alpha(beta, t, self.n), ".17g"),
                                 pinsker_j0(beta, t, self.n),
                                 g.count, format(g.sq_norm, ".17g")])


def default_epsilon(n: int) -> float:
    return 1.0 / math.log(n + 1.0)


def default_k_star(n: int) -> int:
    return max(1, math.ceil(math.sqrt(math.log(n + 1.0))))


def build_grid(n: int, k_star: Optional[int] = None,
               epsilon: Optional[float] = None) -> WeightGrid:
    """Construct the weight family over {1..k_star} x {eps, 2 eps, .., m eps}.

    Members whose cutoff omega falls below 1 would have empty support and are
    dropped with a warning (the family requires 0 < #(gamma)).
    """
    if n < 2:
        raise ValueError("horizon too small: need n >= 2")
    if k_star is None:
        k_star = default_k_star(n)
    if k_star < 1:
        raise ValueError("k_star must be >= 1")
    if epsilon is None:
        epsilon = default_epsilon(n)
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")

    m = int(1.0 / epsilon ** 2)
    if m < 1:
        raise ValueError("epsilon too large: grid has no t values")
    grid = WeightGrid(n=n, k_star=int(k_star), epsilon=float(epsilon))
    for beta in range(1, k_star + 1):
        for i in range(1, m + 1):
            t = i * epsilon
            member = pinsker_sequence((beta, t), n)
            if member.count == 0:
                grid.dropped.append((beta, t))
                continue
            grid.members.append(member)
    if grid.dropped:
        log.warning("dropped %d weight sequences with empty support (omega < 1): %s",
                    len(grid.dropped), grid.dropped[:4])
    if not grid.members:
        raise ValueError("weight grid is empty; increase n or epsilon")
    return grid
