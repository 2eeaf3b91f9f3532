"""Propagating a Kronecker-sum system without ever forming the big matrix.

A 3-D field on a 20 x 20 x 20 grid has N = 8000 unknowns. The discrete
Laplacian is a Kronecker sum of three 20 x 20 matrices, and its exponential
factors into three small exponentials applied one axis at a time.
"""
import time

import numpy as np

from adrexp import (GridSpec, OperatorRecipe, assemble_kronecker_sum, build_directional_operator,
                    expm_dense, kron_action, tucker_apply, unvec, vec)

# %% a small grid first, where the dense matrix is still affordable
grid = GridSpec.uniform((0.0, 1.0), 12, 3)
ops = [build_directional_operator(iv, n, OperatorRecipe(0.05, 0.1))
       for iv, n in zip(grid.intervals, grid.points)]
rng = np.random.default_rng(1)
W = rng.random(grid.dims)
tau = 0.01

K = assemble_kronecker_sum(ops)
print(f"N = {grid.size}, dense operator {K.shape}, {K.nbytes / 2**20:.1f} MiB")

# %% the action of K is a sum of mode products
print("kron_action vs K @ vec:",
      np.abs(vec(kron_action(W, ops)) - K @ vec(W)).max())

# %% e^{tau K} vec(W) as a Tucker operator with three 12 x 12 exponentials
t0 = time.perf_counter()
dense = unvec(expm_dense(tau * K) @ vec(W), grid.dims)
t_dense = time.perf_counter() - t0
t0 = time.perf_counter()
tucker = tucker_apply(W, [expm_dense(tau * A) for A in ops])
t_tucker = time.perf_counter() - t0
print(f"relative difference {np.linalg.norm(dense - tucker) / np.linalg.norm(dense):.2e}")
print(f"dense exponential {t_dense:.3f} s, Tucker route {t_tucker * 1e3:.2f} ms")

# %% a grid where the dense route is out of reach
grid = GridSpec.uniform((0.0, 1.0), 100, 3)
ops = [build_directional_operator(iv, n, OperatorRecipe(0.05, 0.1))
       for iv, n in zip(grid.intervals, grid.points)]
E = [expm_dense(tau * A) for A in ops]
W = rng.random(grid.dims)
t0 = time.perf_counter()
for _ in range(10):
    W = tucker_apply(W, E)
print(f"N = {grid.size:,}: 10 propagation steps in {time.perf_counter() - t0:.2f} s; "
      f"the dense K would need {grid.size ** 2 * 8 / 2**40:.1f} TiB")
