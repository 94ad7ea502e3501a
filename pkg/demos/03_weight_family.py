"""The tapered weight family behind the selection procedure.

Each member is flat up to j0, tapers polynomially to its cutoff omega, and
vanishes beyond it.  The grid enlarges slowly with the horizon: the family
size nu grows like ln^2.5(n) while the largest support mu grows like n^(1/3).

Run:  python demos/03_weight_family.py
"""

from pathlib import Path

import numpy as np

from perisem.weights import build_grid, omega_alpha, pinsker_sequence

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

grid = build_grid(1000)
print(f"n = 1000 defaults: eps = {grid.epsilon:.5f}, m = {grid.m}, "
      f"k* = {grid.k_star}, nu = {grid.nu}, mu = {grid.mu}")
grid.to_csv(OUT / "grid_n1000.csv")
print("wrote", OUT / "grid_n1000.csv")

print("\nsample members (beta, t) -> support, |gamma|^2:")
for g in grid.members[:3] + grid.members[-3:]:
    beta, t = g.label
    print(f"  ({beta}, {t:7.4f}) -> #{g.count:3d}  |gamma|^2 = {g.sq_norm:.3f}")

print("\ngrid growth with the horizon:")
print(f"{'n':>8} {'nu':>6} {'mu':>5} {'(n/eps)^(1/3)':>14}")
for n in (100, 1000, 10_000, 100_000):
    g = build_grid(n)
    print(f"{n:>8} {g.nu:>6} {g.mu:>5} {(n / g.epsilon) ** (1 / 3):>14.1f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping plots")
else:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    for beta, t in ((1, 1.0), (1, 5.0), (2, 5.0), (3, 5.0)):
        seq = pinsker_sequence((beta, t), 1000)
        j = np.arange(1, seq.support_end + 1)
        ax.step(j, seq.values, where="mid",
                label=f"beta={beta}, t={t}, omega={omega_alpha(beta, t, 1000):.1f}")
    ax.set_xlabel("j"), ax.set_ylabel("weight"), ax.legend()
    ax.set_title("taper profiles at n = 1000")
    fig.tight_layout()
    fig.savefig(OUT / "weight_profiles.png", dpi=120)
    print("wrote", OUT / "weight_profiles.png")
