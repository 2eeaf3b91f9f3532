"""Dense matrix exponential and phi-functions for small matrices.

The phi-functions are

    phi_0(X) = exp(X),
    phi_l(X) = int_0^1 theta^(l-1)/(l-1)! exp((1-theta) X) dtheta,   l >= 1,

and satisfy ``X phi_{l+1}(X) = phi_l(X) - I/l!``.

:func:`phi_funcs` obtains ``phi_1 .. phi_p`` from a single exponential of a
block-augmented matrix; :func:`phi_series_oracle` is an independent
Taylor-series route used to check it.
"""
from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

__all__ = [
    "MatrixFunctionError",
    "PhiFamily",
    "expm_dense",
    "phi_funcs",
    "phi_series_oracle",
    "cached_phi_family",
    "clear_phi_cache",
    "MAX_MATRIX_SIZE",
]

#: Largest directional matrix accepted by :func:`phi_funcs` by default.
MAX_MATRIX_SIZE = 1024
MAX_PHI_ORDER = 4


class MatrixFunctionError(ValueError):
    """Invalid input to a matrix function."""


def _check_square(A: np.ndarray, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MatrixFunctionError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise MatrixFunctionError(f"{name} has non-finite entries")
    return A


# Pade coefficients b_0..b_m of the [m/m] approximant to exp, and the
# one-norm bounds below which each degree is accurate to unit roundoff.
_PADE = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_uv(A: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray]:
    b = _PADE[m]
    n = A.shape[0]
    ident = np.eye(n)
    A2 = A @ A
    if m < 13:
        powers = [ident, A2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ A2)
        U = sum(b[2 * k + 1] * powers[k] for k in range(m // 2 + 1))
        V = sum(b[2 * k] * powers[k] for k in range(m // 2 + 1))
        return A @ U, V
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    return U, V


def expm_dense(A: np.ndarray) -> np.ndarray:
    """Matrix exponential by diagonal Pade approximation with scaling and squaring.

    The Pade degree (3, 5, 7, 9 or 13) and the number of squarings are
    chosen from the one-norm of `A`.
    """
    A = _check_square(A)
    n = A.shape[0]
    if n == 0:
        return A.copy()
    norm = np.linalg.norm(A, 1)
    if norm == 0.0:
        return np.eye(n)
    for m in (3, 5, 7, 9):
        if norm <= _THETA[m]:
            U, V = _pade_uv(A, m)
            return np.linalg.solve(V - U, V + U)
    s = max(0, int(math.ceil(math.log2(norm / _THETA[13]))))
    U, V = _pade_uv(A / 2.0 ** s, 13)
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


@dataclass
class PhiFamily:
    """``exp(A)`` together with ``phi_1(A) .. phi_p(A)`` for one matrix `A`."""

    base: np.ndarray
    exp: np.ndarray
    matrices: List[np.ndarray] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.matrices)

    def phi(self, ell: int) -> np.ndarray:
        """Return ``phi_ell(A)``; ``ell = 0`` gives the exponential."""
        if ell == 0:
            return self.exp
        if not 1 <= ell <= self.order:
            raise MatrixFunctionError(
                f"phi_{ell} not available (family computed up to order {self.order})")
        return self.matrices[ell - 1]


def phi_funcs(A: np.ndarray, ell_max: int, *,
              max_size: int = MAX_MATRIX_SIZE) -> PhiFamily:
    """Compute ``exp(A), phi_1(A), ..., phi_{ell_max}(A)``.

    `A` is embedded in the block upper-triangular matrix

        [[A, I, 0, ..., 0],
         [0, 0, I, ..., 0],
         ...
         [0, 0, 0, ..., 0]]

    of size ``(ell_max + 1) n``; the first block row of its exponential is
    ``[exp(A), phi_1(A), ..., phi_{ell_max}(A)]``.
    """
    A = _check_square(A)
    if ell_max < 1:
        raise MatrixFunctionError(f"ell_max must be at least 1, got {ell_max}")
    if ell_max > MAX_PHI_ORDER:
        raise MatrixFunctionError(
            f"phi functions are supported up to order {MAX_PHI_ORDER}, got {ell_max}")
    n = A.shape[0]
    if n > max_size:
        raise MatrixFunctionError(f"matrix of size {n} exceeds the limit {max_size}")
    p = ell_max
    big = np.zeros(((p + 1) * n, (p + 1) * n))
    big[:n, :n] = A
    ident = np.eye(n)
    for k in range(p):
        big[k * n:(k + 1) * n, (k + 1) * n:(k + 2) * n] = ident
    E = expm_dense(big)
    blocks = [E[:n, k * n:(k + 1) * n].copy() for k in range(p + 1)]
    return PhiFamily(base=A.copy(), exp=blocks[0], matrices=blocks[1:])


def _taylor_phis(X: np.ndarray, ell: int) -> List[np.ndarray]:
    # phi_k(X) = sum_j X^j / (j + k)!  for k = 0..ell, summed to stagnation
    n = X.shape[0]
    out = []
    for k in range(ell + 1):
        term = np.eye(n) / math.factorial(k)
        total = term.copy()
        j = 0
        while True:
            j += 1
            term = (X @ term) / (j + k)
            new = total + term
            if np.array_equal(new, total) or j > 200:
                break
            total = new
        out.append(total)
    return out


def phi_series_oracle(A: np.ndarray, ell: int) -> np.ndarray:
    """Reference value of ``phi_ell(A)`` by scaled Taylor series.

    `A` is halved until its one-norm is at most 1, the series of
    ``phi_0 .. phi_ell`` are summed until they stop changing, and the
    scaling is undone with the doubling relations

        phi_0(2X) = phi_0(X)^2,
        phi_k(2X) = 2^-k [phi_0(X) phi_k(X) + sum_{j=1..k} phi_j(X)/(k-j)!].

    Independent of :func:`expm_dense`; intended for verification only.
    """
    A = _check_square(A)
    if ell < 0:
        raise MatrixFunctionError(f"ell must be non-negative, got {ell}")
    norm = np.linalg.norm(A, 1)
    s = max(0, int(math.ceil(math.log2(norm)))) if norm > 1.0 else 0
    phis = _taylor_phis(A / 2.0 ** s, ell)
    for _ in range(s):
        new = [phis[0] @ phis[0]]
        for k in range(1, ell + 1):
            acc = phis[0] @ phis[k]
            for j in range(1, k + 1):
                acc = acc + phis[j] / math.factorial(k - j)
            new.append(acc / 2.0 ** k)
        phis = new
    return phis[ell]


_cache: Dict[Tuple[str, Tuple[int, ...], float, int], PhiFamily] = {}
_cache_lock = threading.Lock()


def _fingerprint(A: np.ndarray) -> str:
    return hashlib.sha1(np.ascontiguousarray(A, dtype=float).tobytes()).hexdigest()


def cached_phi_family(A: np.ndarray, tau: float, ell_max: int = 2) -> PhiFamily:
    """:func:`phi_funcs` of ``tau * A``, memoized on (matrix contents, tau, order)."""
    A = np.asarray(A, dtype=float)
    key = (_fingerprint(A), A.shape, float(tau), int(ell_max))
    with _cache_lock:
        fam = _cache.get(key)
    if fam is None:
        fam = phi_funcs(float(tau) * A, ell_max)
        with _cache_lock:
            _cache.setdefault(key, fam)
    return fam


def clear_phi_cache() -> None:
    with _cache_lock:
        _cache.clear()
