"""Transition probabilities of boson sampling with partially distinguishable photons.

Conventions: ``V`` is the ``N x N`` scattering submatrix with rows indexed by
input photons and columns by output modes; ``S_ij = <phi_i|phi_j>`` is the
distinguishability matrix of the input photons. Every evaluator returns a
:class:`TransitionReport` that carries, besides the probability, the
closed-form operation count of the algorithm (``op_count``) and the number of
multiplications the implementation tallied while running
(``measured_multiplies``).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np

from .core import (
    DEFAULT_TOL,
    FACTORIAL_CUTOFF,
    CapacityError,
    DimensionError,
    ValidationError,
    as_matrix,
    count_with_moved,
    enumerate_permutations,
    occupation,
    submatrix_for_transition,
)
from .distinguishability import DistinguishabilityMatrix
from .monotones import j_a, nonzero_mask, valid_grades
from .permanent import gurvits_capacity, permanent_abs, permanent_ryser, permanent_ryser_batch

IE_MAX_N = 14
DOUBLE_SUM_MAX_N = 6
ORACLE_TOL = 1e-9
CHAIN_SLACK = 1e-12
_BATCH = 4096


class InvariantError(RuntimeError):
    """An internal consistency check (oracle agreement, bound chain) failed."""


class Algorithm(str, enum.Enum):
    BRUTE_FORCE = "BruteForce"
    INCLUSION_EXCLUSION = "InclusionExclusion"
    PRUNED = "PrunedInclusionExclusion"
    RYSER_INDISTINGUISHABLE = "RyserIndistinguishable"
    PERM_ABS_DISTINGUISHABLE = "PermAbsDistinguishable"
    TRUNCATED = "TruncatedK"


@dataclass
class Bounds:
    tighter: float | None
    perm_bound: float
    gurvits_bound: float | None


@dataclass
class TransitionReport:
    probability: float
    algorithm: Algorithm
    op_count: int
    measured_multiplies: int
    bounds: Bounds | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["algorithm"] = self.algorithm.value
        return out


def _report(value: complex, algorithm: Algorithm, op_count: int, measured: int, *,
            signed_ok: bool = False, **details) -> TransitionReport:
    value = complex(value)
    if abs(value.imag) > ORACLE_TOL:
        raise InvariantError(f"probability has imaginary residue {value.imag:.3e}")
    # partial sums such as P_k may dip below zero
    if not signed_ok and value.real < -ORACLE_TOL:
        raise InvariantError(f"probability is negative: {value.real:.3e}")
    return TransitionReport(float(value.real), algorithm, int(op_count), int(measured), details=details)


def _inputs(V, S) -> tuple[np.ndarray, np.ndarray]:
    V = as_matrix(V, square=True)
    if not isinstance(S, DistinguishabilityMatrix):
        S = DistinguishabilityMatrix(S)
    if S.N != V.shape[0]:
        raise DimensionError(f"V is {V.shape[0]}x{V.shape[0]} but S is {S.N}x{S.N}")
    return V, S.gram


def scattering_matrix(U, n, m) -> np.ndarray:
    """``V`` for collision-free input ``n`` and output ``m``.

    Collision outputs need occupation factorials that the permanent sums here
    omit; use :mod:`permcoh.fockoracle` for those.
    """
    n, m = occupation(n), occupation(m)
    if not (n.collision_free and m.collision_free):
        raise ValidationError("transition formulas need collision-free input and output")
    return submatrix_for_transition(U, n, m)


# --- permutation-sum machinery -------------------------------------------------


@lru_cache(maxsize=None)
def _perm_table(N: int) -> np.ndarray:
    table = np.array([p.image for p in enumerate_permutations(N, FACTORIAL_CUTOFF)], dtype=np.intp)
    table.setflags(write=False)
    return table


def _moved(table: np.ndarray) -> np.ndarray:
    return (table != np.arange(table.shape[1])).sum(axis=1)


def sigma_weights(S: np.ndarray, table: np.ndarray) -> np.ndarray:
    """``prod_i S[i, sigma_i]`` for each permutation row of ``table``."""
    N = S.shape[0]
    return np.prod(S[np.arange(N), table], axis=1)


def sigma_permanents(V: np.ndarray, table: np.ndarray) -> np.ndarray:
    """``perm(V * conj(V)[sigma^-1, :])`` for each permutation row of ``table``.

    This is the factor multiplying ``prod_i S[i, sigma_i]`` in the
    permutation expansion of the transition probability.
    """
    N = V.shape[0]
    inv = np.argsort(table, axis=1)
    out = np.empty(table.shape[0], dtype=np.complex128)
    Vc = V.conj()
    for lo in range(0, table.shape[0], _BATCH):
        chunk = inv[lo:lo + _BATCH]
        mats = V[None, :, :] * Vc[chunk]
        out[lo:lo + len(chunk)] = permanent_ryser_batch(mats)
    return out


def _ryser_multiplies(N: int) -> int:
    return ((1 << N) - 1) * max(N - 1, 0)


def probability_double_sum(V, S) -> complex:
    """Double permutation sum ``sum_{sigma,rho} prod_j V[sigma_j,j] conj(V[rho_j,j]) S[rho_j,sigma_j]``.

    Independent of the permanent code path; used as an oracle for ``N <= 6``.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    if N > DOUBLE_SUM_MAX_N:
        raise CapacityError(f"double permutation sum is capped at N={DOUBLE_SUM_MAX_N}")
    T = _perm_table(N)
    cols = np.arange(N)
    a = V[T, cols]                      # (K, N): V[sigma_j, j]
    b = V.conj()[T, cols]               # (K, N): conj V[rho_j, j]
    total = 0j
    for k in range(T.shape[0]):
        # fix sigma = T[k], vectorize over rho
        Sk = S[T, T[k][None, :]]        # (K, N): S[rho_j, sigma_j]
        total += np.sum(np.prod(a[k][None, :] * b * Sk, axis=1))
    return complex(total)


def probability_bruteforce(V, S, *, check_double_sum: bool = True) -> TransitionReport:
    """Sum over ``S_N`` of ``prod_i S[i, sigma_i] * perm(V * conj(V)[sigma^-1])``.

    For ``N <= 6`` the double permutation sum is evaluated as well and the
    two must agree to ``1e-9``.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    T = _perm_table(N)
    value = complex(np.sum(sigma_weights(S, T) * sigma_permanents(V, T)))
    details = {}
    if check_double_sum and N <= DOUBLE_SUM_MAX_N:
        other = probability_double_sum(V, S)
        details["double_sum_probability"] = other.real
        if abs(other - value) > ORACLE_TOL * max(1.0, abs(value)):
            raise InvariantError(f"permutation sum {value} disagrees with double sum {other}")
    fact = math.factorial(N)
    op_count = fact * (1 << max(N - 1, 0)) * N * N
    measured = fact * (N - 1 + N * N + _ryser_multiplies(N))
    return _report(value, Algorithm.BRUTE_FORCE, op_count, measured, **details)


# --- inclusion-exclusion over subset pairs -------------------------------------


def ie_op_count(N: int, nnz: int) -> int:
    """Closed-form count ``2^(2(N-1)) * N * nnz`` for the subset-pair formula."""
    return (1 << (2 * (N - 1))) * N * nnz


def _subset_matrix(N: int) -> np.ndarray:
    idx = np.arange(1 << N)
    return ((idx[:, None] >> np.arange(N)[None, :]) & 1).astype(np.float64)


def _ie_chunk(V, triples, N, r_range, prune):
    """Partial sum of the subset-pair formula over row subsets in ``r_range``."""
    rs, ss, w = triples
    X = _subset_matrix(N)[1:]           # nonempty column subsets Sigma
    sign_sigma = np.where(X.sum(axis=1) % 2, -1.0, 1.0)
    total = 0j
    multiplies = 0
    vanishing = []
    for R in r_range:
        in_R = (R >> rs) & 1 == 1
        # T[s, j]: sum over active triples (r in R, s) of S_rs conj(V_rj) V_sj
        T = np.zeros((N, N), dtype=np.complex128)
        np.add.at(T, ss[in_R], w[in_R])
        counts = np.bincount(ss[in_R], minlength=N).astype(np.float64)
        active = X @ counts            # active triples per (R, Sigma)
        multiplies += int(active.sum()) * N
        B = X @ T
        if prune:
            keep = active > 0
            for k in np.flatnonzero(~keep):
                vanishing.append((int(R), int(k) + 1))
            B, signs = B[keep], sign_sigma[keep]
        else:
            signs = sign_sigma
        multiplies += B.shape[0] * (N - 1)
        sign_R = -1.0 if bin(R).count("1") % 2 else 1.0
        total += sign_R * np.sum(signs * np.prod(B, axis=1))
    return total, multiplies, vanishing


def _triples(V: np.ndarray, S: np.ndarray, tol: float):
    mask = nonzero_mask(S, tol)
    rs, ss = np.nonzero(mask)
    # w[t, j] = S_rs conj(V_rj) V_sj, precomputed once per nonzero entry
    w = S[rs, ss][:, None] * V.conj()[rs] * V[ss]
    return rs, ss, w


def _run_ie(V, S, prune: bool, workers: int, tol: float):
    N = V.shape[0]
    if N > IE_MAX_N:
        raise CapacityError(f"subset-pair inclusion-exclusion is capped at N={IE_MAX_N}")
    triples = _triples(V, S, tol)
    nnz = len(triples[0])
    Rs = range(1, 1 << N)
    workers = max(1, min(int(workers), len(Rs)))
    chunks = [Rs[i::workers] for i in range(workers)]
    if workers == 1:
        parts = [_ie_chunk(V, triples, N, chunks[0], prune)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _ie_chunk(V, triples, N, c, prune), chunks))
    total = sum(p[0] for p in parts)
    multiplies = sum(p[1] for p in parts) + 2 * N * nnz
    vanishing = sorted(v for p in parts for v in p[2])
    # (-1)^(|R| + |Sigma|) carries the overall sign; N brackets contribute (-1)^(2N) = 1
    return total, multiplies, nnz, vanishing


def probability_inclusion_exclusion(V, S, *, workers: int = 1, tol: float = DEFAULT_TOL) -> TransitionReport:
    """Subset-pair inclusion-exclusion,

    ``P = sum_{R, Sigma} (-1)^{|R|+|Sigma|} prod_j sum_{r in R, s in Sigma} V_sj conj(V_rj) S_rs``,

    with zero entries of ``S`` dropped from the inner bracket.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    total, multiplies, nnz, _ = _run_ie(V, S, False, workers, tol)
    return _report(total, Algorithm.INCLUSION_EXCLUSION, ie_op_count(N, nnz), multiplies, nonzero_count=nnz)


def _subset(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def pruning_counts(N: int, vanishing: list[tuple[int, int]]) -> dict:
    """Symmetry-halved bookkeeping of the pruned algorithm.

    The dense baseline is ``2^(2(N-1)) N^3 / 2``: every pair ``(R, Sigma)``
    costs ``N |R| |Sigma|`` bracket terms and ``(R, Sigma)``, ``(Sigma, R)``
    are conjugate so only one of each is charged. A vanishing pair saves its
    ``N |R| |Sigma|`` terms once per conjugate class.
    """
    baseline = (1 << (2 * (N - 1))) * N ** 3 // 2
    # one representative per conjugate class: smaller set first, then lower mask
    classes = sorted({min((R, Sg), (Sg, R), key=lambda p: (bin(p[0]).count("1"), p[0]))
                      for R, Sg in vanishing},
                     key=lambda p: (bin(p[0]).count("1") + bin(p[1]).count("1"), p))
    listed = []
    skipped = 0
    for R, Sg in classes:
        r, s = _subset(R), _subset(Sg)
        cost = N * len(r) * len(s)
        skipped += cost
        listed.append({"R": [i + 1 for i in r], "S": [i + 1 for i in s], "terms": cost})
    return {
        "baseline_count": baseline,
        "skipped_terms": skipped,
        "pruned_count": baseline - skipped,
        "vanishing_pairs": listed,
        "ordered_vanishing_pairs": len(vanishing),
    }


def probability_pruned(V, S, *, workers: int = 1, tol: float = DEFAULT_TOL) -> TransitionReport:
    """Inclusion-exclusion that skips subset pairs whose ``S`` block is all zero.

    ``details`` carries the 1-based vanishing pairs (one per conjugate class)
    with their term counts, and the symmetry-halved baseline and pruned
    counts from :func:`pruning_counts`.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    total, multiplies, nnz, vanishing = _run_ie(V, S, True, workers, tol)
    details = pruning_counts(N, vanishing)
    details["nonzero_count"] = nnz
    return _report(total, Algorithm.PRUNED, ie_op_count(N, nnz), multiplies, **details)


def probability_indistinguishable(V) -> TransitionReport:
    """``|perm V|^2``; valid when every ``S_ij`` has unit modulus with a phase-vector form."""
    V = as_matrix(V, square=True)
    N = V.shape[0]
    value = abs(permanent_ryser(V)) ** 2
    return _report(value, Algorithm.RYSER_INDISTINGUISHABLE, (1 << (N - 1)) * N * N, _ryser_multiplies(N) + 1)


def probability_distinguishable(V) -> TransitionReport:
    """``perm(|V|^2)`` for fully distinguishable photons."""
    V = as_matrix(V, square=True)
    N = V.shape[0]
    value = permanent_ryser(np.abs(V) ** 2)
    return _report(value, Algorithm.PERM_ABS_DISTINGUISHABLE, (1 << (N - 1)) * N * N,
                   _ryser_multiplies(N) + N * N)


# --- fixed-point grading, truncation, bounds -----------------------------------


@dataclass
class ZDecomposition:
    terms: dict[int, complex]
    signed: bool

    def total(self) -> complex:
        return sum(self.terms.values())


def z_decomposition(V, S, signed: bool = True) -> ZDecomposition:
    """Group the permutation sum by the number ``a`` of moved points.

    ``signed=True`` keeps ``prod S[i, sigma_i] * perm(...)`` so the terms sum
    to the probability. ``signed=False`` uses ``J_sigma * |perm(...)|`` and the
    terms sum to an upper bound.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    T = _perm_table(N)
    perms = sigma_permanents(V, T)
    weights = sigma_weights(S, T)
    contrib = weights * perms if signed else np.abs(weights) * np.abs(perms)
    moved = _moved(T)
    terms = {a: complex(contrib[moved == a].sum()) for a in valid_grades(N)}
    return ZDecomposition(terms, signed)


def probability_truncated(V, S, k: int) -> TransitionReport:
    """``P_k``: the signed fixed-point grades ``a <= k`` only.

    ``P_k`` is a partial sum and can be negative for small ``k``.

    ``details['residual_bound']`` is the absolute-mode sum over ``a > k``,
    which bounds ``|P - P_k|``; ``details['x']`` is ``J_k^(1/k)``.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    if k not in valid_grades(N):
        raise ValidationError(f"k must be one of {valid_grades(N)}, got {k}")
    T = _perm_table(N)
    moved = _moved(T)
    keep = moved <= k
    perms = sigma_permanents(V, T)
    weights = sigma_weights(S, T)
    value = complex(np.sum(weights[keep] * perms[keep]))
    residual = float(np.sum(np.abs(weights[~keep]) * np.abs(perms[~keep])))
    x = j_a(S, k)[0] ** (1.0 / k) if k >= 2 else None
    used = sum(count_with_moved(N, a) for a in valid_grades(N) if a <= k)
    op_count = used * (1 << (N - 1)) * N * N
    measured = used * (N - 1 + N * N + _ryser_multiplies(N))
    return _report(value, Algorithm.TRUNCATED, op_count, measured, signed_ok=True,
                   k=k, residual_bound=residual, x=x, permutations_used=used)


def _le(a: float, b: float) -> bool:
    return a <= b + CHAIN_SLACK * max(1.0, abs(b))


def _doubly_stochastic(P: np.ndarray, tol: float = 1e-8) -> bool:
    return (np.max(np.abs(P.sum(axis=0) - 1)) <= tol
            and np.max(np.abs(P.sum(axis=1) - 1)) <= tol)


def bounds(V, S, *, probability: float | None = None) -> Bounds:
    """Upper bounds ``P <= tighter <= perm_bound <= gurvits_bound``.

    * ``tighter``: ``sum_sigma |perm(V * conj V_sigma)| J_sigma`` (``None`` past the factorial cutoff);
    * ``perm_bound``: ``perm(|V|^2) * perm(|S|)``;
    * ``gurvits_bound``: ``2^N F(|V|^2) perm(|S|)``, only when ``|V|^2`` is
      doubly stochastic (``V`` itself unitary), else ``None``.

    The chain is checked with ``1e-12`` slack; a violation raises
    :class:`InvariantError`.
    """
    V, S = _inputs(V, S)
    N = V.shape[0]
    if N > IE_MAX_N:
        raise CapacityError(f"bounds are capped at N={IE_MAX_N}")
    P2 = np.abs(V) ** 2
    p_dist = float(permanent_ryser(P2).real)
    pabs = permanent_abs(S)
    perm_bound = p_dist * pabs
    tighter = None
    if N <= FACTORIAL_CUTOFF:
        T = _perm_table(N)
        tighter = float(np.sum(np.abs(sigma_weights(S, T)) * np.abs(sigma_permanents(V, T))))
    gurvits = None
    if _doubly_stochastic(P2):
        gurvits = float(2 ** N * gurvits_capacity(P2) * pabs)
    if probability is None and N <= FACTORIAL_CUTOFF:
        probability = probability_bruteforce(V, S, check_double_sum=False).probability
    chain = [("P", probability), ("tighter", tighter), ("perm_bound", perm_bound), ("gurvits_bound", gurvits)]
    chain = [(name, val) for name, val in chain if val is not None]
    for (n1, v1), (n2, v2) in zip(chain, chain[1:]):
        if not _le(v1, v2):
            raise InvariantError(f"bound chain violated: {n1}={v1} > {n2}={v2}")
    return Bounds(tighter, perm_bound, gurvits)


ALGORITHMS = {
    "brute": probability_bruteforce,
    "ie": probability_inclusion_exclusion,
    "pruned": probability_pruned,
}
