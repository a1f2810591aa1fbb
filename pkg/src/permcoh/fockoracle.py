"""Brute-force Fock-space simulation of photons with internal states.

Independent of the permanent formulas: the input state is built as a product
of creation operators over (mode, internal level) pairs, each operator is
pushed through the interferometer, and the resulting polynomial is expanded
term by term. Only meant for a handful of photons.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

from .core import ValidationError, as_matrix, occupation, OccupationVector
from .distinguishability import gram_from_states, states_from_gram, validate_states

MAX_PHOTONS = 4
MAX_MODES = 5
RANK_TOL = 1e-10


def internal_coordinates(states, basis: str = "gram") -> np.ndarray:
    """Coordinates of the internal states in an orthonormal basis of their span.

    ``"gram"`` factors the Gram matrix ``S``; ``"svd"`` factors the state
    matrix itself. Both give ``N x r`` coordinates with ``r`` the numerical
    rank, and both reproduce the same overlaps.
    """
    phi = validate_states(states)
    if basis == "gram":
        S = gram_from_states(phi)
        w = np.linalg.eigvalsh(S.gram)
        rank = int(np.sum(w > RANK_TOL * max(w.max(), 1.0)))
        coords = states_from_gram(S)
        # eigh sorts ascending, so the span lives in the last ``rank`` columns
        return coords[:, coords.shape[1] - rank:]
    if basis == "svd":
        _, sv, vh = np.linalg.svd(phi, full_matrices=False)
        rank = int(np.sum(sv > RANK_TOL * max(sv.max(), 1.0)))
        return phi @ vh[:rank].conj().T
    raise ValueError(f"unknown basis {basis!r}")


def simulate(U, states, n, basis: str = "gram") -> dict[OccupationVector, float]:
    """Output-occupation distribution for photons with internal ``states`` entering ``U``.

    Photon ``i`` enters the ``i``-th occupied input mode. Mode ``p`` evolves
    as ``a_p^dagger -> sum_q U[p, q] a_q^dagger``, independently of the
    internal level. Collision outputs are included.
    """
    U = as_matrix(U, square=True)
    n = occupation(n)
    M = U.shape[0]
    coords = internal_coordinates(states, basis)
    N, r = coords.shape
    if n.modes != M:
        raise ValidationError(f"input occupation has {n.modes} modes, unitary has {M}")
    if not n.collision_free:
        raise ValidationError("the oracle takes collision-free inputs only")
    if n.photons != N:
        raise ValidationError(f"{n.photons} input photons but {N} internal states")
    if N > MAX_PHOTONS or M > MAX_MODES:
        raise ValidationError(f"oracle is limited to N <= {MAX_PHOTONS}, M <= {MAX_MODES}")

    inputs = n.repeated_indices()
    # row i: amplitude of photon i on composite index q * r + k
    rows = [np.outer(U[p], coords[i]).ravel() for i, p in enumerate(inputs)]

    poly: dict[tuple[int, ...], complex] = {(): 1.0 + 0j}
    for row in rows:
        support = np.flatnonzero(row)
        nxt: dict[tuple[int, ...], complex] = defaultdict(complex)
        for key, c in poly.items():
            for x in support:
                nxt[tuple(sorted(key + (int(x),)))] += c * row[x]
        poly = nxt

    probs: dict[tuple[int, ...], float] = defaultdict(float)
    for key, c in poly.items():
        norm = math.prod(math.factorial(len(list(g))) for _, g in itertools.groupby(key))
        modes = [0] * M
        for x in key:
            modes[x // r] += 1
        probs[tuple(modes)] += float(abs(c) ** 2 * norm)
    return {OccupationVector(k): v for k, v in probs.items()}


def collision_free_outputs(M: int, N: int) -> list[OccupationVector]:
    out = []
    for combo in itertools.combinations(range(M), N):
        occ = [0] * M
        for q in combo:
            occ[q] = 1
        out.append(OccupationVector(tuple(occ)))
    return out

