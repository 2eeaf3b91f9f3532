"""The phi-functions behind exponential Runge-Kutta methods.

phi_0(z) = e^z and phi_{l+1}(z) = (phi_l(z) - 1/l!) / z. For matrices the
division is replaced by the recurrence A phi_{l+1}(A) = phi_l(A) - I/l!,
which stays well defined for singular A (a Neumann Laplacian is singular).
"""
import math

import numpy as np

from adrexp import OperatorRecipe, build_directional_operator, phi_funcs, phi_series_oracle

# %% scalar sanity check
fam = phi_funcs(np.array([[1.0]]), 3)
for ell in range(4):
    print(f"phi_{ell}(1) = {fam.phi(ell)[0, 0]:.12f}")
print("closed forms: e - 1 =", math.e - 1, " e - 2 =", math.e - 2)

# %% a singular matrix: the Neumann diffusion operator
A = build_directional_operator((0.0, 1.0), 40, OperatorRecipe(1.0))
tau = 1e-3
fam = phi_funcs(tau * A, 2)
print("\nsmallest |eigenvalue| of tau*A:", np.abs(np.linalg.eigvals(tau * A)).min())
for ell in (0, 1):
    res = tau * A @ fam.phi(ell + 1) - (fam.phi(ell) - np.eye(40) / math.factorial(ell))
    print(f"recurrence residual l={ell}: {np.abs(res).max():.1e}")

# %% phi_1 and phi_2 leave constants nearly untouched, like their scalar values at 0
ones = np.ones(40)
print("phi_1 @ 1 - 1:", np.abs(fam.phi(1) @ ones - 1).max())
print("phi_2 @ 1 - 1/2:", np.abs(fam.phi(2) @ ones - 0.5).max())

# %% against the independent Taylor + doubling oracle on a stiffer scaling
B = 0.5 * A / np.linalg.norm(A, 1) * 8
for ell in (1, 2):
    ref = phi_series_oracle(B, ell)
    err = np.linalg.norm(phi_funcs(B, 2).phi(ell) - ref) / np.linalg.norm(ref)
    print(f"phi_{ell}: relative difference to the series oracle {err:.1e}")
