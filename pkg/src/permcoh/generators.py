"""Seeded random instances: Haar unitaries, Gram matrices, Gram actions."""

from __future__ import annotations

import numpy as np

from .core import Permutation, ValidationError
from .distinguishability import DistinguishabilityMatrix, gram_from_states
from .pgio import GramAction

# recorded in emitted metadata so runs can be reproduced
RNG_ALGORITHM = "numpy.random.Generator(PCG64)"


def rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def haar_unitary(M: int, seed=None) -> np.ndarray:
    """Haar-random ``M x M`` unitary via QR of a complex Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so the distribution is
    exactly Haar rather than QR-convention dependent.
    """
    if M < 1:
        raise ValidationError("M must be >= 1")
    g = rng(seed)
    z = (g.standard_normal((M, M)) + 1j * g.standard_normal((M, M))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_states(N: int, d: int, seed=None) -> np.ndarray:
    """``N`` uniformly random unit vectors in ``C^d``, one per row."""
    g = rng(seed)
    v = g.standard_normal((N, d)) + 1j * g.standard_normal((N, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_gram(N: int, seed=None, rank: int | None = None) -> DistinguishabilityMatrix:
    rank = N if rank is None else rank
    if not 1 <= rank <= N:
        raise ValidationError(f"rank must be in [1, {N}], got {rank}")
    return gram_from_states(random_states(N, rank, seed))


def achievable_nonzero_counts(N: int) -> list[int]:
    """Values of ``sum b_i^2`` over integer partitions ``b`` of ``N``."""
    return sorted({sum(b * b for b in p) for p in _partitions(N)})


def _partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for b in range(min(n, largest), 0, -1):
        for rest in _partitions(n - b, b):
            yield (b,) + rest


def block_partition_for(N: int, nnz_target: int) -> tuple[int, ...]:
    """A partition of ``N`` with ``sum b_i^2 == nnz_target``, largest blocks first."""
    for p in _partitions(N):
        if sum(b * b for b in p) == nnz_target:
            return p
    raise ValidationError(
        f"nnz_target={nnz_target} is not reachable with block-diagonal S for N={N}; "
        f"achievable values: {achievable_nonzero_counts(N)}"
    )


def random_gram_with_sparsity(N: int, nnz_target: int, seed=None) -> DistinguishabilityMatrix:
    """Random block-diagonal Gram matrix with exactly ``nnz_target`` nonzero entries.

    Photons in different blocks live in orthogonal internal sectors, so their
    overlaps are exactly zero; within a block the states are dense random.
    """
    if not N <= nnz_target <= N * N or (nnz_target - N) % 2:
        raise ValidationError(
            f"nnz_target must satisfy N <= nnz <= N^2 with nnz - N even; got {nnz_target}"
        )
    blocks = block_partition_for(N, nnz_target)
    g = rng(seed)
    states = np.zeros((N, N), dtype=np.complex128)
    start = 0
    for b in blocks:
        # a block of size b spans its own b internal dimensions
        states[start:start + b, start:start + b] = random_states(b, b, g)
        start += b
    return gram_from_states(states)


def random_gram_action(N: int, seed=None, rank: int | None = None) -> GramAction:
    """Random ``(A, sigma)`` with ``A`` a random Gram matrix and ``sigma`` uniform."""
    g = rng(seed)
    A = random_gram(N, g, rank).gram
    sigma = Permutation(tuple(g.permutation(N)))
    return GramAction(A, sigma)


def sparse_four_photon_gram(overlap: complex = 0.3) -> DistinguishabilityMatrix:
    """N=4 Gram matrix with ``S_13 = S_24 = S_34 = 0`` (1-based) and the given overlap elsewhere."""
    s = complex(overlap)
    gram = np.array(
        [[1, s, 0, s],
         [np.conj(s), 1, s, 0],
         [0, np.conj(s), 1, 0],
         [np.conj(s), 0, 0, 1]],
        dtype=np.complex128,
    )
    return DistinguishabilityMatrix(gram)
