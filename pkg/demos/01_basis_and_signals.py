"""Tour of the trigonometric basis and the built-in signal catalogue.

Run:  python demos/01_basis_and_signals.py
Writes plots into demos/out/ when matplotlib is available.
"""

from pathlib import Path

import numpy as np

from perisem import basis
from perisem.signals import catalogue

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

# The basis: phi_1 = 1, then interleaved sqrt(2) cos / sqrt(2) sin pairs.
t = np.linspace(0.0, 1.0, 400, endpoint=False)
print("first basis values at t = 0.2:",
      [round(basis.phi(j, 0.2), 4) for j in range(1, 6)])

# Orthonormality on [0, 1]: the Gram matrix is the identity to ~1e-14.
gram = basis.gram_matrix(32, 4096)
print("max |gram - I| over 32 x 32 block:", np.max(np.abs(gram - np.eye(32))))

# The catalogue spans finite-band, smooth analytic and slowly decaying cases.
print("\nsignal catalogue:")
for name, signal in catalogue().items():
    theta = signal.fourier_coefficients(64)
    energy = float(np.sum(theta ** 2))
    try:
        smooth = f"|S'|_1 = {signal.sdot_l1():.3f}"
    except ValueError:
        smooth = "no derivative"
    print(f"  {name:14s} energy(<=64) = {energy:.4f}   {smooth}")

# Coefficient decay distinguishes the band-limited signals (exact zeros)
# from the decaying one (theta_j ~ j^-2).
poly = catalogue()["poly_decay"]
theta = poly.fourier_coefficients(64)
print("\npoly_decay coefficient tail: theta_8 = %.5f, theta_32 = %.5f, "
      "theta_64 = %.5f" % (theta[7], theta[31], theta[63]))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping plots")
else:
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.5))
    for j in (1, 2, 3, 6):
        axes[0].plot(t, basis.phi(j, t), label=f"j = {j}")
    axes[0].legend(), axes[0].set_title("basis functions")
    for name in ("sine", "parabola", "two_component", "poly_decay"):
        axes[1].plot(t, catalogue()[name].eval(t), label=name)
    axes[1].legend(), axes[1].set_title("catalogue signals")
    fig.tight_layout()
    fig.savefig(OUT / "basis_and_signals.png", dpi=120)
    print("\nwrote", OUT / "basis_and_signals.png")
