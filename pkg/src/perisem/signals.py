"""1-periodic target signals: evaluation, Fourier coefficients, derivative mass.

A signal is given either as an analytic function handle (with an optional
derivative handle) or as a finite coefficient sequence (theta_j)_{j<=J} in
the trigonometric basis of :mod:`perisem.basis`.  Both forms are evaluated
after reducing the argument to its fractional part, so every signal is
1-periodic by construction.

The built-in catalogue spans the cases exercised by the verification suite:
finite-band signals, smooth analytic signals, and a slowly decaying
infinite-band-style signal truncated at 512 coefficients.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from . import basis

_DEFAULT_QUAD = 4096
_DERIV_QUAD = 8192


class SignalSpec:
    """A 1-periodic real signal on [0, 1).

    Exactly one of ``fn`` and ``coefficients`` must be given.  ``derivative``
    is the analytic derivative handle (analytic form only); coefficient-form
    signals are differentiated term by term.  ``sdot_l1`` may be supplied to
    override the quadrature value of int_0^1 |S'(t)| dt.
    """

    def __init__(self, fn: Optional[Callable] = None,
                 derivative: Optional[Callable] = None,
                 coefficients=None,
                 sdot_l1: Optional[float] = None,
                 name: str = ""):
        if (fn is None) == (coefficients is None):
            raise ValueError("give exactly one of fn / coefficients")
        if sdot_l1 is not None and sdot_l1 < 0:
            raise ValueError("sdot_l1 must be nonnegative")
        self.fn = fn
        self.derivative = derivative
        self.coefficients = None
        if coefficients is not None:
            coefficients = np.asarray(coefficients, dtype=float)
            if coefficients.ndim != 1 or coefficients.size < 1:
                raise ValueError("coefficient form needs a 1-d sequence with J >= 1")
            if not np.all(np.isfinite(coefficients)):
                raise ValueError("coefficients must be finite")
            self.coefficients = coefficients
        self._sdot_l1 = None if sdot_l1 is None else float(sdot_l1)
        self.name = name

    # -- constructors -------------------------------------------------

    @classmethod
    def from_function(cls, fn, derivative=None, sdot_l1=None, name=""):
        return cls(fn=fn, derivative=derivative, sdot_l1=sdot_l1, name=name)

    @classmethod
    def from_coefficients(cls, coefficients, sdot_l1=None, name=""):
        return cls(coefficients=coefficients, sdot_l1=sdot_l1, name=name)

    @classmethod
    def from_file(cls, path, name=""):
        """Load a coefficient signal from text: one ``j value`` pair per line."""
        pairs = []
        with open(path, "r", encoding="ascii") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'j value', got {raw!r}")
                j = int(parts[0])
                if j < 1:
                    raise ValueError(f"{path}:{lineno}: index must be >= 1")
                pairs.append((j, float(parts[1])))
        if not pairs:
            raise ValueError(f"{path}: no coefficients found")
        coeffs = np.zeros(max(j for j, _ in pairs))
        for j, v in pairs:
            coeffs[j - 1] = v
        return cls.from_coefficients(coeffs, name=name or str(path))

    # -- basic properties ----------------------------------------------

    @property
    def is_coefficient_form(self) -> bool:
        return self.coefficients is not None

    def __repr__(self):
        kind = "coefficients" if self.is_coefficient_form else "analytic"
        return f"SignalSpec({self.name or kind})"

    # -- evaluation ------------------------------------------------------

    def eval(self, t):
        """S({t}) where {t} is the fractional part of t."""
        tt = np.asarray(t, dtype=float)
        scalar = tt.ndim == 0
        frac = tt - np.floor(tt)
        if self.is_coefficient_form:
            out = _eval_series(self.coefficients, frac)
        else:
            out = np.asarray(self.fn(frac), dtype=float)
        return float(out) if scalar else out

    def fourier_coefficients(self, j_max: int,
                             quad_points: Optional[int] = None) -> np.ndarray:
        """theta_j = int_0^1 S phi_j dt for j = 1..j_max.

        Exact passthrough (padded or truncated) for coefficient-form signals;
        composite midpoint quadrature otherwise.  The default node count
        scales with j_max so that no requested frequency sits above the
        quadrature's alias-free band.
        """
        if j_max < 1:
            raise ValueError("j_max must be >= 1")
        if self.is_coefficient_form:
            out = np.zeros(j_max)
            m = min(j_max, self.coefficients.size)
            out[:m] = self.coefficients[:m]
            return out
        if quad_points is None:
            need = 4 * (j_max // 2 + 1)
            quad_points = max(_DEFAULT_QUAD, 1 << int(need - 1).bit_length())
        t = (np.arange(quad_points) + 0.5) / quad_points
        values = np.asarray(self.fn(t), dtype=float) / quad_points
        return basis.phi_weighted_sums(t, values, j_max)

    def sdot_l1(self, quad_points: Optional[int] = None) -> float:
        """int_0^1 |S'(t)| dt by composite midpoint quadrature."""
        if self._sdot_l1 is not None:
            return self._sdot_l1
        if self.is_coefficient_form:
            dcoef = derivative_coefficients(self.coefficients)
            if quad_points is None:
                # keep the derivative's full band well inside the grid
                need = 8 * (dcoef.size // 2 + 1)
                quad_points = max(_DERIV_QUAD, 1 << int(need - 1).bit_length())
            t = (np.arange(quad_points) + 0.5) / quad_points
            dvals = _eval_series(dcoef, t)
        elif self.derivative is not None:
            quad_points = _DERIV_QUAD if quad_points is None else quad_points
            t = (np.arange(quad_points) + 0.5) / quad_points
            dvals = np.asarray(self.derivative(t), dtype=float)
        else:
            raise ValueError("derivative unavailable for this signal")
        return float(np.mean(np.abs(dvals)))

    def norm_sq(self, quad_points: int = _DEFAULT_QUAD) -> float:
        """Quadrature value of int_0^1 S(t)^2 dt."""
        t = (np.arange(quad_points) + 0.5) / quad_points
        return float(np.mean(self.eval(t) ** 2))


def _eval_series(coefficients: np.ndarray, frac: np.ndarray) -> np.ndarray:
    """Sum_j theta_j phi_j at already-reduced points, via rotation recurrence."""
    coefficients = np.asarray(coefficients, dtype=float)
    out = np.full_like(frac, coefficients[0] if coefficients.size else 0.0)
    j_max = coefficients.size
    p_max = j_max // 2
    if p_max == 0:
        return out
    z = np.exp((2j * np.pi) * frac)
    zp = z.copy()
    for p in range(1, p_max + 1):
        c_coef = coefficients[2 * p - 1]
        if c_coef != 0.0:
            out += (basis.SQRT2 * c_coef) * zp.real
        if 2 * p + 1 <= j_max:
            s_coef = coefficients[2 * p]
            if s_coef != 0.0:
                out += (basis.SQRT2 * s_coef) * zp.imag
        if p < p_max:
            np.multiply(zp, z, out=zp)
    return out


def derivative_coefficients(coefficients) -> np.ndarray:
    """Coefficients of S' for a coefficient-form S (term-wise differentiation).

    phi_{2p}' = -2*pi*p * phi_{2p+1} and phi_{2p+1}' = 2*pi*p * phi_{2p}, so the
    derivative is again a finite series in the same basis.
    """
    theta = np.asarray(coefficients, dtype=float)
    j_max = theta.size
    # a trailing cosine index needs room for its sine partner
    pad = 1 if (j_max >= 2 and j_max % 2 == 0 and theta[j_max - 1] != 0.0) else 0
    out = np.zeros(j_max + pad)
    for p in range(1, j_max // 2 + 1):
        w = 2.0 * np.pi * p
        out[2 * p - 1] += w * (theta[2 * p] if 2 * p + 1 <= j_max else 0.0)
        if 2 * p + 1 <= out.size:
            out[2 * p] += -w * theta[2 * p - 1]
    return out


def antiderivative_increments(coefficients, edges: np.ndarray) -> np.ndarray:
    """Exact integrals of a coefficient-form signal over cells [edges_i, edges_{i+1}].

    Used to build discretized observations without quadrature bias.
    """
    theta = np.asarray(coefficients, dtype=float)
    prim = np.zeros_like(np.asarray(edges, dtype=float))
    prim += theta[0] * edges          # primitive of phi_1 = t
    for p in range(1, theta.size // 2 + 1):
        w = 2.0 * np.pi * p
        if theta[2 * p - 1] != 0.0:   # phi_{2p} = sqrt2 cos -> sqrt2 sin / w
            prim += theta[2 * p - 1] * basis.SQRT2 * np.sin(w * edges) / w
        if 2 * p + 1 <= theta.size and theta[2 * p] != 0.0:
            prim += theta[2 * p] * -basis.SQRT2 * np.cos(w * edges) / w
    return np.diff(prim)


# -- built-in catalogue ---------------------------------------------------

_POLY_DECAY_J = 512


def _poly_decay_coefficients() -> np.ndarray:
    j = np.arange(1, _POLY_DECAY_J + 1, dtype=float)
    raw = j ** -2.0
    return raw / np.sqrt(np.sum(raw ** 2))


def catalogue() -> dict:
    """Named test signals spanning trivial, finite-band and decaying cases."""
    two_mode = np.zeros(5)
    two_mode[1] = 1.0
    two_mode[4] = 0.3
    single = np.zeros(2)
    single[1] = 1.0
    return {
        "zero": SignalSpec.from_coefficients(np.zeros(1), name="zero"),
        "single_mode": SignalSpec.from_coefficients(single, name="single_mode"),
        "two_mode": SignalSpec.from_coefficients(two_mode, name="two_mode"),
        "sine": SignalSpec.from_function(
            lambda t: np.sin(2 * np.pi * t),
            derivative=lambda t: 2 * np.pi * np.cos(2 * np.pi * t),
            name="sine"),
        "parabola": SignalSpec.from_function(
            lambda t: t * (1.0 - t),
            derivative=lambda t: 1.0 - 2.0 * t,
            name="parabola"),
        "two_component": SignalSpec.from_function(
            lambda t: np.sin(2 * np.pi * t) + 0.3 * t * (1.0 - t),
            derivative=lambda t: 2 * np.pi * np.cos(2 * np.pi * t) + 0.3 * (1.0 - 2.0 * t),
            name="two_component"),
        "poly_decay": SignalSpec.from_coefficients(_poly_decay_coefficients(),
                                                   name="poly_decay"),
    }


def catalogue_signal(name: str) -> SignalSpec:
    try:
        return catalogue()[name]
    except KeyError:
        known = ", ".join(sorted(catalogue()))
        raise ValueError(f"unknown signal {name!r}; catalogue: {known}") from None
