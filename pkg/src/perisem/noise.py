"""Semimartingale noise: Brownian motion plus a compound Poisson jump part.

The disturbance is xi_t = rho1 * w_t + rho2 * z_t with w a standard Brownian
motion and z_t = sum_{k <= N_t} Y_k a compound Poisson process of intensity
``lam`` whose marks Y_k are i.i.d. with mean 0 and variance 1.  Its intensity
constant is sigma_star = rho1^2 + lam * rho2^2: for any f, the stochastic
integral I_n(f) = int_0^n f d(xi) has mean zero and
E I_n(f) I_n(g) = sigma_star * int_0^n f g.

Two simulators are provided.

* ``simulate_coefficient_noise`` draws the exact law of the normalized
  coefficient noise xi_{j,n} = n^{-1/2} I_n(phi_j).  Over an integer horizon
  the basis is orthonormal on [0, n] up to the factor n, so the Brownian
  integrals n^{-1/2} int phi_j dw are exactly i.i.d. standard normal and the
  jump part reduces to (rho2 / sqrt(n)) * sum_k phi_j(T_k) Y_k.

* ``simulate_path_increments`` discretizes the path of xi itself on a uniform
  grid (left-open cells: a jump landing exactly on a grid point belongs to
  the cell it closes).

Reproducibility: every random stream is derived from a master seed with
``numpy.random.SeedSequence(master_seed, spawn_key=(replicate, kind))``,
kind 0 for the Brownian stream and kind 1 for the jump stream.  Replicates
are therefore independent and order-free, which makes batched simulation
deterministic for any chunking or thread count.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import basis

RADEMACHER = "rademacher"
GAUSSIAN = "gaussian"
_JUMP_M4 = {RADEMACHER: 1.0, GAUSSIAN: 3.0}

BROWNIAN_KIND = 0
JUMP_KIND = 1

# Replicates are grouped so that each group's concatenated arrivals stay
# around this size; the basis kernel then works on cache-resident blocks.
_TARGET_ARRIVALS = 250_000


@dataclass(frozen=True)
class NoiseParams:
    """Amplitudes (rho1, rho2), Poisson intensity lam, and the jump mark law."""

    rho1: float
    rho2: float
    lam: float
    jump_law: str = RADEMACHER

    def __post_init__(self):
        if abs(self.rho1) + abs(self.rho2) <= 0.0:
            raise ValueError("need |rho1| + |rho2| > 0")
        if not self.lam > 0.0:
            raise ValueError("jump intensity lam must be positive")
        if self.jump_law not in _JUMP_M4:
            raise ValueError(f"unknown jump law {self.jump_law!r}; "
                             f"use {RADEMACHER!r} or {GAUSSIAN!r}")

    @property
    def m4(self) -> float:
        """Fourth moment E Y^4 of the mark law."""
        return _JUMP_M4[self.jump_law]


@dataclass
class JumpRecord:
    """Arrival times T_k in (0, n] and the associated marks Y_k."""

    arrival_times: np.ndarray
    marks: np.ndarray

    def __post_init__(self):
        self.arrival_times = np.asarray(self.arrival_times, dtype=float)
        self.marks = np.asarray(self.marks, dtype=float)
        if self.arrival_times.shape != self.marks.shape:
            raise ValueError("arrival_times and marks must have equal length")
        if self.arrival_times.size and not np.all(np.diff(self.arrival_times) > 0):
            raise ValueError("arrival times must be strictly increasing")

    def __len__(self):
        return self.arrival_times.size

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "T_k", "Y_k"])
            for k, (t, y) in enumerate(zip(self.arrival_times, self.marks), 1):
                writer.writerow([k, format(t, ".17g"), format(y, ".17g")])

    @classmethod
    def from_csv(cls, path):
        times, marks = [], []
        with open(path, "r", newline="", encoding="ascii") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                times.append(float(row["T_k"]))
                marks.append(float(row["Y_k"]))
        return cls(np.array(times), np.array(marks))


def sigma_star(p: NoiseParams) -> float:
    """Noise intensity rho1^2 + lam * rho2^2 (= E xi_{j,n}^2 for every j, n)."""
    return p.rho1 ** 2 + p.lam * p.rho2 ** 2


def stream_rng(master_seed: int, replicate: int, kind: int) -> np.random.Generator:
    """The documented seed mixing: SeedSequence(master, spawn_key=(replicate, kind))."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(replicate, kind))
    return np.random.default_rng(ss)


def replicate_rng(master_seed: int, replicate: int) -> np.random.Generator:
    """Base generator of one replicate; spawning it yields the per-kind streams."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(replicate,))
    return np.random.default_rng(ss)


def _draw_marks(p: NoiseParams, count: int, rng: np.random.Generator) -> np.ndarray:
    if p.jump_law == RADEMACHER:
        return rng.integers(0, 2, size=count).astype(float) * 2.0 - 1.0
    return rng.standard_normal(count)


def sample_jumps(p: NoiseParams, n: int, rng: np.random.Generator) -> JumpRecord:
    """Arrivals of a rate-lam Poisson process on (0, n] plus i.i.d. marks.

    Exponential inter-arrival gaps, drawn in blocks sized for the expected
    count; marks are drawn from the same stream after all gaps.
    """
    n = _check_horizon(n)
    mean_count = p.lam * n
    block = max(16, int(mean_count + 8.0 * np.sqrt(mean_count) + 16))
    gaps = rng.exponential(scale=1.0 / p.lam, size=block)
    total = np.cumsum(gaps)
    while total[-1] <= n:
        extra = rng.exponential(scale=1.0 / p.lam, size=block)
        total = np.concatenate([total, total[-1] + np.cumsum(extra)])
    times = total[total <= n]
    marks = _draw_marks(p, times.size, rng)
    return JumpRecord(times, marks)


def _check_horizon(n) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise ValueError(f"horizon n must be a positive integer, got {n!r}")
    return int(n)


def simulate_coefficient_noise(p: NoiseParams, n: int, j_max: int,
                               rng: np.random.Generator):
    """Draw (xi_{j,n})_{j<=j_max} exactly, returning (vector, JumpRecord).

    xi_{j,n} = rho1 * g_j + (rho2 / sqrt(n)) * sum_k phi_j(T_k) Y_k with
    (g_j) i.i.d. standard normal.
    """
    n = _check_horizon(n)
    if j_max > n:
        raise ValueError(f"j_max={j_max} exceeds the observation budget n={n}")
    b_rng, j_rng = rng.spawn(2)
    record = sample_jumps(p, n, j_rng)
    xi = p.rho1 * b_rng.standard_normal(j_max)
    if record.arrival_times.size:
        jump_proj = basis.phi_weighted_sums(record.arrival_times, record.marks, j_max)
        xi += (p.rho2 / np.sqrt(n)) * jump_proj
    return xi, record


def simulate_coefficient_noise_batch(p: NoiseParams, n: int, j_max: int,
                                     master_seed: int, replicates: int,
                                     rep_offset: int = 0,
                                     threads: int = 1) -> np.ndarray:
    """(replicates, j_max) matrix of coefficient noise draws.

    Row r is distributed exactly as ``simulate_coefficient_noise`` seeded
    with ``replicate_rng(master_seed, rep_offset + r)``; values agree with
    the per-replicate call up to summation order (~1e-13).
    """
    n = _check_horizon(n)
    if j_max > n:
        raise ValueError(f"j_max={j_max} exceeds the observation budget n={n}")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")

    xi = np.empty((replicates, j_max))
    times_per_rep = []
    marks_per_rep = []
    for r in range(replicates):
        rng = replicate_rng(master_seed, rep_offset + r)
        b_rng, j_rng = rng.spawn(2)
        xi[r] = b_rng.standard_normal(j_max)
        rec = sample_jumps(p, n, j_rng)
        times_per_rep.append(rec.arrival_times)
        marks_per_rep.append(rec.marks)
    xi *= p.rho1

    counts = np.array([t.size for t in times_per_rep], dtype=np.int64)
    if counts.sum() == 0 or p.rho2 == 0.0:
        return xi
    points = np.concatenate(times_per_rep)
    weights = np.concatenate(marks_per_rep)
    scale = p.rho2 / np.sqrt(n)

    group = max(1, int(np.ceil(_TARGET_ARRIVALS / max(1, counts.max()))))
    bounds = list(range(0, replicates, group)) + [replicates]
    starts = np.zeros(replicates + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])

    def run(i: int):
        lo, hi = bounds[i], bounds[i + 1]
        a, b = starts[lo], starts[hi]
        proj = basis.phi_weighted_sums_batch(points[a:b], weights[a:b],
                                             counts[lo:hi], j_max)
        xi[lo:hi] += scale * proj

    n_groups = len(bounds) - 1
    if threads > 1 and n_groups > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n_groups)))
    else:
        for i in range(n_groups):
            run(i)
    return xi


def simulate_path_increments(p: NoiseParams, n: int, steps_per_unit: int,
                             rng: np.random.Generator):
    """Increments of xi over the uniform grid of [0, n], plus the JumpRecord.

    Cell increment = rho1 * sqrt(dt) * g + rho2 * (sum of marks with arrival
    in the cell); cells are left-open, so an arrival exactly at a grid point
    is assigned to the cell it closes.
    """
    n = _check_horizon(n)
    if steps_per_unit < 8:
        raise ValueError("steps_per_unit must be >= 8")
    cells = n * steps_per_unit
    b_rng, j_rng = rng.spawn(2)
    increments = (p.rho1 / np.sqrt(steps_per_unit)) * b_rng.standard_normal(cells)
    record = sample_jumps(p, n, j_rng)
    if record.arrival_times.size:
        idx = assign_cells(record.arrival_times, steps_per_unit, cells)
        increments += p.rho2 * np.bincount(idx, weights=record.marks, minlength=cells)
    return increments, record


def assign_cells(times: np.ndarray, steps_per_unit: int, cells: int) -> np.ndarray:
    """Index of the left-open grid cell ((i-1)*dt, i*dt] containing each time."""
    idx = np.ceil(np.asarray(times, dtype=float) * steps_per_unit).astype(np.int64) - 1
    return np.clip(idx, 0, cells - 1)
