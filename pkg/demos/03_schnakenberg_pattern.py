"""Turing spots in the 2-D Schnakenberg model.

Starting from the homogeneous equilibrium plus noise of size 1e-5, the
activator u organizes into a stationary array of spots. The time increment
||U_{n+1} - U_n||_F rises during the reactive phase and then collapses.

Run with a smaller grid for a quick look: ``python3 03_schnakenberg_pattern.py 64``.
"""
import sys

import numpy as np

from adrexp import get_model, run

n = int(sys.argv[1]) if len(sys.argv) > 1 else 150
model = get_model("schnakenberg2d")
grid = model.grid(n)
tau, T = 5e-4, 2.0

final, ind = run(model, grid, "etd2rkds", tau, T, stride=1)
inc = np.asarray(ind.increment)
peak = int(inc.argmax())
print(f"n = {n}, {len(inc)} steps of {tau}")
print(f"peak increment {inc[peak]:.3e} at t = {ind.t[peak]:.3f}")
print(f"final increment {inc[-1]:.3e} ({inc[-1] / inc[peak]:.1e} of the peak)")
print(f"u ranges over [{final.U.min():.3f}, {final.U.max():.3f}]")

# %% coarse text rendering of u (dark = high concentration)
shades = " .:-=+*#%@"
step = max(1, n // 40)
sub = final.U[::step, ::step]
lo, hi = sub.min(), sub.max()
for row in sub:
    print("".join(shades[int((v - lo) / (hi - lo + 1e-300) * (len(shades) - 1))] for v in row))

# %% rough spot count: local maxima above the mean
U = final.U
inner = U[1:-1, 1:-1]
is_max = np.ones_like(inner, dtype=bool)
for di in (-1, 0, 1):
    for dj in (-1, 0, 1):
        if di or dj:
            is_max &= inner >= U[1 + di:U.shape[0] - 1 + di, 1 + dj:U.shape[1] - 1 + dj]
print("interior spots:", int((is_max & (inner > U.mean())).sum()))
