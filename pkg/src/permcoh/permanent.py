"""Exact matrix permanents and the Gurvits capacity of doubly stochastic matrices."""

from __future__ import annotations

import numpy as np

from .core import (
    FACTORIAL_CUTOFF,
    CapacityError,
    ValidationError,
    as_matrix,
    enumerate_permutations,
)

RYSER_MAX_N = 30


def permanent_naive(mat, cutoff: int = FACTORIAL_CUTOFF) -> complex:
    """Leibniz-style sum over all of ``S_N``. Test oracle only."""
    A = as_matrix(mat, square=True)
    n = A.shape[0]
    rows = np.arange(n)
    total = 0j
    for sigma in enumerate_permutations(n, cutoff):
        total += np.prod(A[rows, sigma.as_array()])
    return complex(total)


def _gray_steps(n: int):
    """Yield ``(column, added, parity)`` for each nonempty Gray-code subset of ``n`` columns."""
    for k in range(1, 1 << n):
        col = (k & -k).bit_length() - 1
        gray = k ^ (k >> 1)
        yield col, bool(gray >> col & 1), bin(gray).count("1") & 1


def permanent_ryser(mat) -> complex:
    """Ryser's inclusion-exclusion formula with Gray-code ordered column subsets.

    Row sums over the current column subset are updated by a single column
    add/remove per step, so the cost is ``O(2^N N)``.
    """
    A = as_matrix(mat, square=True)
    return complex(permanent_ryser_batch(A[None])[0])


def permanent_ryser_batch(mats) -> np.ndarray:
    """Ryser permanents of a stack of square matrices, shape ``(B, N, N)``."""
    A = np.asarray(mats, dtype=np.complex128)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError(f"expected a (B, N, N) stack, got shape {A.shape}")
    n = A.shape[1]
    if n > RYSER_MAX_N:
        raise CapacityError(f"N={n} exceeds the Ryser subset index width {RYSER_MAX_N}")
    if n == 0:
        return np.ones(A.shape[0], dtype=np.complex128)
    row_sums = np.zeros(A.shape[:2], dtype=np.complex128)
    total = np.zeros(A.shape[0], dtype=np.complex128)
    for col, added, parity in _gray_steps(n):
        if added:
            row_sums += A[:, :, col]
        else:
            row_sums -= A[:, :, col]
        term = np.prod(row_sums, axis=1)
        total += -term if parity else term
    # sum over S of (-1)^|S| prod, times (-1)^N
    return total if n % 2 == 0 else -total


def permanent_abs(mat) -> float:
    """Permanent of the entrywise modulus; always real and nonnegative."""
    A = np.abs(as_matrix(mat, square=True))
    return float(permanent_ryser(A).real)


def gurvits_capacity(dsm, tol: float = 1e-8) -> float:
    """``prod_ij (1 - p_ij)^(1 - p_ij)`` for a doubly stochastic ``p``.

    Uses the convention ``0^0 = 1`` at ``p_ij = 1``. Small excursions of the
    entries outside ``[0, 1]`` within ``tol`` are clipped.
    """
    P = as_matrix(dsm, square=True)
    if np.max(np.abs(P.imag), initial=0.0) > tol:
        raise ValidationError("doubly stochastic matrix must be real")
    P = P.real
    if np.any(P < -tol) or np.any(P > 1 + tol):
        raise ValidationError("entries must lie in [0, 1]")
    if (np.max(np.abs(P.sum(axis=0) - 1)) > tol
            or np.max(np.abs(P.sum(axis=1) - 1)) > tol):
        raise ValidationError("matrix is not doubly stochastic within tolerance")
    q = 1.0 - np.clip(P, 0.0, 1.0)
    # x^x -> 1 as x -> 0, so zero entries contribute log 1 = 0
    logs = np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0)), 0.0)
    return float(np.exp(logs.sum()))
