"""Coefficient estimates from observations and weighted least-squares estimates.

Observations follow dy_t = S(t) dt + d(xi_t) on [0, n].  The estimate of the
j-th Fourier coefficient is theta_hat_{j,n} = (1/n) int_0^n phi_j dy; on a
discretized path this becomes the left-point Riemann-Stieltjes sum, and with
coefficient-level noise it is exactly theta_j + xi_{j,n} / sqrt(n).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import basis
from .signals import SignalSpec, antiderivative_increments
from .weights import WeightSequence

_TAIL_FLOOR = 512


@dataclass
class CoefficientEstimates:
    """Estimated coefficients (theta_hat_{j,n})_{j<=j_max} at horizon n."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("values must be a 1-d sequence")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("estimates must be finite")
        if self.j_max > self.n:
            raise ValueError(f"j_max={self.j_max} exceeds the horizon n={self.n}")

    @property
    def j_max(self) -> int:
        return self.values.size

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh)
            writer.writerow(["j", "theta_hat"])
            for j, v in enumerate(self.values, 1):
                writer.writerow([j, format(v, ".17g")])

    @classmethod
    def from_csv(cls, path, n: int):
        values = []
        with open(path, "r", newline="", encoding="ascii") as fh:
            for row in csv.DictReader(fh):
                values.append(float(row["theta_hat"]))
        return cls(np.array(values), n)


@dataclass
class PathObservation:
    """Increments of the observation process over a uniform grid of [0, n]."""

    increments: np.ndarray
    steps_per_unit: int
    n: int

    def __post_init__(self):
        self.increments = np.asarray(self.increments, dtype=float)
        expected = self.n * self.steps_per_unit
        if self.increments.size != expected:
            raise ValueError(f"expected {expected} increments "
                             f"(n={self.n} x {self.steps_per_unit}), "
                             f"got {self.increments.size}")


def make_observation(S: SignalSpec, n: int, steps_per_unit: int,
                     noise_increments: Optional[np.ndarray] = None) -> PathObservation:
    """Discretized observation: per-cell signal mass plus optional noise increments.

    The signal mass int_cell S dt is exact for coefficient-form signals and
    computed by oversampled midpoint quadrature (8 points per cell) otherwise.
    """
    cells = n * steps_per_unit
    if S.is_coefficient_form:
        edges = np.arange(cells + 1) / steps_per_unit
        signal_mass = antiderivative_increments(S.coefficients, edges)
    else:
        over = 8
        t = (np.arange(cells * over) + 0.5) / (steps_per_unit * over)
        signal_mass = S.eval(t).reshape(cells, over).mean(axis=1) / steps_per_unit
    if noise_increments is None:
        dy = signal_mass
    else:
        noise_increments = np.asarray(noise_increments, dtype=float)
        if noise_increments.size != cells:
            raise ValueError("noise increments do not match the grid")
        dy = signal_mass + noise_increments
    return PathObservation(dy, steps_per_unit, n)


def estimate_coefficients_from_path(obs: PathObservation, j_max: int) -> CoefficientEstimates:
    """Left-point Stieltjes sums theta_hat_j = (1/n) sum_cells phi_j(t_left) dy."""
    if j_max > obs.n:
        raise ValueError(f"j_max={j_max} exceeds the observation budget n={obs.n}")
    t_left = np.arange(obs.increments.size) / obs.steps_per_unit
    sums = basis.phi_weighted_sums(t_left, obs.increments, j_max)
    return CoefficientEstimates(sums / obs.n, obs.n)


def estimate_coefficients_exact(S: SignalSpec, noise_vector, n: int) -> CoefficientEstimates:
    """theta_hat_j = theta_j + xi_{j,n} / sqrt(n) from coefficient-level noise."""
    noise_vector = np.asarray(noise_vector, dtype=float)
    j_max = noise_vector.size
    if j_max > n:
        raise ValueError(f"noise vector length {j_max} exceeds the horizon n={n}")
    theta = S.fourier_coefficients(j_max)
    return CoefficientEstimates(theta + noise_vector / np.sqrt(n), n)


def weighted_estimate(gamma: WeightSequence, est: CoefficientEstimates) -> SignalSpec:
    """The weighted least-squares estimate with coefficients gamma(j) * theta_hat_j."""
    support = gamma.support_end
    if support > est.j_max:
        raise ValueError(f"weight support {support} exceeds the estimate budget "
                         f"j_max={est.j_max}")
    coeffs = gamma.values[:support] * est.values[:support]
    if coeffs.size == 0:
        coeffs = np.zeros(1)
    return SignalSpec.from_coefficients(coeffs, name="weighted_estimate")


def empirical_error(gamma: WeightSequence, est: CoefficientEstimates,
                    S: SignalSpec, j_tail: Optional[int] = None) -> float:
    """Squared distance ||S_hat_gamma - S||^2 in coefficient space.

    Sum over j <= j_max of (gamma(j) theta_hat_j - theta_j)^2 plus the tail
    sum of theta_j^2 for j_max < j <= j_tail (where gamma and theta_hat are
    zero).  j_tail defaults to max(j_max, 512); the neglected remainder is
    bounded by 4 * |S'|_1^2 / j_tail for differentiable signals.
    """
    if j_tail is None:
        j_tail = max(est.j_max, _TAIL_FLOOR)
    if j_tail < est.j_max:
        raise ValueError("j_tail must be >= j_max")
    theta = S.fourier_coefficients(j_tail)
    g = np.zeros(est.j_max)
    support = min(gamma.support_end, est.j_max)
    g[:support] = gamma.values[:support]
    head = np.sum((g * est.values - theta[:est.j_max]) ** 2)
    tail = np.sum(theta[est.j_max:] ** 2)
    return float(head + tail)


def segments_to_path(segments: Sequence[PathObservation]) -> PathObservation:
    """Concatenate single-period observations into one path over [0, len(segments)].

    This realizes the reduction of repeated records x^k on [0, 1] to one
    process on [0, n]: increments within period k coincide with those of x^k,
    so the concatenated increments define the combined observation.
    """
    segments = list(segments)
    if not segments:
        raise ValueError("need at least one segment")
    spu = segments[0].steps_per_unit
    for k, seg in enumerate(segments):
        if seg.n != 1:
            raise ValueError(f"segment {k} spans n={seg.n} periods; expected 1")
        if seg.steps_per_unit != spu:
            raise ValueError(f"segment {k} grid {seg.steps_per_unit} != {spu}")
    increments = np.concatenate([seg.increments for seg in segments])
    return PathObservation(increments, spu, len(segments))
