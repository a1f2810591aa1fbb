"""Permuted-genuine coherence monotones: nonzero counts, perm(|rho|) and the graded J_a."""

from __future__ import annotations

import functools

import numpy as np

from .core import DEFAULT_TOL, DimensionError, Permutation, ValidationError, as_matrix, permutations_with_moved
from .distinguishability import DistinguishabilityMatrix, normalize
from .permanent import permanent_abs

J_A_CUTOFF = 12
INCREASE_TOL = 1e-12


def _gram(S) -> np.ndarray:
    return S.gram if isinstance(S, DistinguishabilityMatrix) else as_matrix(S, square=True)


def nonzero_mask(rho, tol: float) -> np.ndarray:
    A = np.abs(as_matrix(rho, square=True))
    peak = A.max(initial=0.0)
    if peak == 0.0:
        return np.zeros(A.shape, dtype=bool)
    return A > tol * peak


def nonzero_count(rho, tol: float = DEFAULT_TOL) -> int:
    """Number of entries above ``tol`` relative to the largest modulus."""
    return int(nonzero_mask(rho, tol).sum())


def offdiagonal_count(rho, tol: float = DEFAULT_TOL) -> int:
    mask = nonzero_mask(rho, tol)
    np.fill_diagonal(mask, False)
    return int(mask.sum())


def j_sigma(S, sigma: Permutation) -> float:
    """``|prod_i S[i, sigma_i]|``."""
    G = _gram(S)
    if G.shape[0] != len(sigma):
        raise DimensionError(f"matrix is {G.shape[0]}x{G.shape[0]}, permutation has {len(sigma)} points")
    return float(np.prod(np.abs(G[np.arange(G.shape[0]), sigma.as_array()])))


def valid_grades(N: int) -> list[int]:
    return [0] + list(range(2, N + 1))


def j_a(S, a: int) -> tuple[float, Permutation]:
    """Largest ``j_sigma`` over permutations moving exactly ``a`` points.

    Ties go to the lexicographically smallest permutation.
    """
    G = _gram(S)
    N = G.shape[0]
    if a == 1 or a < 0 or a > N:
        raise ValidationError(f"no permutation of {N} points moves exactly {a} of them")
    if N > J_A_CUTOFF:
        raise ValidationError(f"J_a enumeration is capped at N={J_A_CUTOFF}")
    table = _moved_table(N, a)
    vals = np.prod(np.abs(G)[np.arange(N), table], axis=1)
    k = int(np.argmax(vals))
    return float(vals[k]), Permutation(tuple(table[k]))


@functools.lru_cache(maxsize=None)
def _moved_table(N: int, a: int) -> np.ndarray:
    """Images of all permutations moving exactly ``a`` points, lexicographic rows."""
    table = np.array([p.image for p in permutations_with_moved(N, a)], dtype=np.intp)
    table.setflags(write=False)
    return table


def monotone_values(rho, tol: float = DEFAULT_TOL) -> dict[str, float]:
    """All monotones of a normalized state ``rho``.

    ``perm_abs`` carries the fixed ``(1/N)^N`` scale of the normalization, so
    only compare it between matrices of equal ``N``.
    """
    rho = as_matrix(rho, square=True)
    N = rho.shape[0]
    out: dict[str, float] = {
        "nonzero_count": nonzero_count(rho, tol),
        "offdiagonal_count": offdiagonal_count(rho, tol),
        "perm_abs": permanent_abs(rho),
    }
    for a in valid_grades(N):
        out[f"J_{a}"] = j_a(rho, a)[0]
    return out


def monotone_report(S_before: DistinguishabilityMatrix, S_after: DistinguishabilityMatrix,
                    tol: float = DEFAULT_TOL) -> dict[str, dict]:
    """Before/after values of every monotone on ``normalize(S)``.

    ``increased`` is set when the after-value exceeds the before-value by
    more than ``1e-12`` relative; ``decreased`` means decreased-or-equal.
    """
    if S_before.N != S_after.N:
        raise DimensionError(f"N differs: {S_before.N} vs {S_after.N}")
    before = monotone_values(normalize(S_before).rho, tol)
    after = monotone_values(normalize(S_after).rho, tol)
    report = {}
    for key, b in before.items():
        a = after[key]
        increased = a > b + INCREASE_TOL * max(abs(b), 1e-300)
        report[key] = {"before": b, "after": a, "decreased": not increased, "increased": bool(increased)}
    return report


def any_increase(report: dict[str, dict]) -> bool:
    return any(entry["increased"] for entry in report.values())
