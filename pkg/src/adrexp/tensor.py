"""Order-d tensors and the mu-mode / Tucker / Kronecker-sum kernels.

A tensor field is a plain :class:`numpy.ndarray` of shape ``(n_1, ..., n_d)``
holding float64 values. Its *linearization* is column-major: the first index
varies fastest, so that for ``d = 2`` the tensor is a matrix and :func:`vec`
stacks its columns. With this convention the Kronecker sum

    K = A_d (+) ... (+) A_1

acts on ``vec(T)`` as ``vec(sum_mu T x_mu A_mu)``.

Axes are numbered from 0 as usual in numpy: ``mu = 0`` is the first
(fastest varying) direction.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

__all__ = [
    "ShapeError",
    "OracleSizeError",
    "vec",
    "unvec",
    "mu_mode_product",
    "tucker_apply",
    "kron_action",
    "assemble_kronecker_sum",
    "ORACLE_MAX_SIZE",
]

#: Largest N = prod(dims) for which the dense Kronecker assembly is allowed.
ORACLE_MAX_SIZE = 4096


class ShapeError(ValueError):
    """Raised when a matrix does not fit the tensor axis it is applied to."""


class OracleSizeError(ValueError):
    """Raised when a dense test-only construction would be too large."""


def vec(T: np.ndarray) -> np.ndarray:
    """Flatten `T` with the first index varying fastest."""
    return np.asarray(T, dtype=float).ravel(order="F")


def unvec(v: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`vec`.

    Returns a C-contiguous array of shape `dims` (the memory layout is an
    implementation detail; only the index mapping matters).
    """
    v = np.asarray(v, dtype=float)
    dims = tuple(int(n) for n in dims)
    if v.ndim != 1 or v.size != int(np.prod(dims)):
        raise ShapeError(
            f"vector of length {v.size} cannot be unfolded into dims {dims}")
    return np.ascontiguousarray(v.reshape(dims, order="F"))


def _check_mode(T: np.ndarray, M: np.ndarray, mu: int) -> None:
    if M.ndim != 2:
        raise ShapeError(f"axis {mu}: expected a 2-D matrix, got ndim={M.ndim}")
    if not 0 <= mu < T.ndim:
        raise ShapeError(f"axis {mu} out of range for a tensor of order {T.ndim}")
    if M.shape[1] != T.shape[mu]:
        raise ShapeError(
            f"axis {mu}: matrix has {M.shape[1]} columns but the tensor has "
            f"{T.shape[mu]} entries along this axis")


def mu_mode_product(T: np.ndarray, M: np.ndarray, mu: int) -> np.ndarray:
    """Multiply `M` onto every mode-`mu` fiber of `T`.

    The result has the shape of `T` except along axis `mu`, whose length
    becomes ``M.shape[0]``. For a matrix ``T``, ``mu=0`` gives ``M @ T`` and
    ``mu=1`` gives ``T @ M.T``.

    The product is evaluated as a (batched) matrix-matrix multiply on a
    reshaped view, without permuting the data.
    """
    T = np.asarray(T, dtype=float)
    M = np.asarray(M, dtype=float)
    _check_mode(T, M, mu)
    T = np.ascontiguousarray(T)
    shape = T.shape
    m = M.shape[0]
    if mu == T.ndim - 1:
        return T @ M.T
    if mu == 0:
        out = M @ T.reshape(shape[0], -1)
        return out.reshape((m,) + shape[1:])
    before = int(np.prod(shape[:mu]))
    after = int(np.prod(shape[mu + 1:]))
    out = M @ T.reshape(before, shape[mu], after)
    return out.reshape(shape[:mu] + (m,) + shape[mu + 1:])


def tucker_apply(T: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Apply the Tucker operator ``T x_1 mats[0] x_2 ... x_d mats[d-1]``.

    Modes act on disjoint axes, so the order of application is irrelevant
    up to rounding.
    """
    T = np.asarray(T, dtype=float)
    if len(mats) != T.ndim:
        raise ShapeError(
            f"need one matrix per axis: got {len(mats)} for order {T.ndim}")
    out = T
    for mu, M in enumerate(mats):
        out = mu_mode_product(out, M, mu)
    return out


def kron_action(T: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    """Return ``sum_mu T x_mu ops[mu]``, i.e. the Kronecker sum applied to `T`."""
    T = np.asarray(T, dtype=float)
    if len(ops) != T.ndim:
        raise ShapeError(
            f"need one operator per axis: got {len(ops)} for order {T.ndim}")
    out = np.zeros_like(T)
    for mu, A in enumerate(ops):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ShapeError(f"axis {mu}: operator must be square, got {A.shape}")
        out += mu_mode_product(T, A, mu)
    return out


def assemble_kronecker_sum(ops: Sequence[np.ndarray],
                           max_size: int = ORACLE_MAX_SIZE) -> np.ndarray:
    """Assemble ``A_d (+) ... (+) A_1`` as a dense matrix.

    Test/oracle helper only: refuses to build anything larger than
    `max_size` rows.
    """
    ops = [np.atleast_2d(np.asarray(A, dtype=float)) for A in ops]
    if not ops:
        raise ShapeError("at least one operator is required")
    for mu, A in enumerate(ops):
        if A.shape[0] != A.shape[1]:
            raise ShapeError(f"axis {mu}: operator must be square, got {A.shape}")
    dims = [A.shape[0] for A in ops]
    N = int(np.prod(dims))
    if N > max_size:
        raise OracleSizeError(
            f"Kronecker sum of size {N} exceeds the oracle limit {max_size}")
    K = np.zeros((N, N))
    for mu, A in enumerate(ops):
        # I_d x ... x I_{mu+1} x A_mu x I_{mu-1} x ... x I_1
        factors = [np.eye(n) for n in dims]
        factors[mu] = A
        K += reduce(np.kron, reversed(factors))
    return K
