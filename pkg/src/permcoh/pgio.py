"""Permuted genuinely incoherent operations (pGIO) and neighbouring incoherent classes.

A pGIO acts on a density matrix as ``rho'_ij = (A * rho)_{sigma_i sigma_j}``
with ``A`` a unit-diagonal Gram matrix and ``sigma`` a permutation; this
module stores that action directly (:class:`GramAction`), converts Kraus
representations into it, and classifies arbitrary Kraus sets structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    DimensionError,
    Permutation,
    ValidationError,
    as_matrix,
    matrix_from_json,
    matrix_to_json,
)
from .distinguishability import (
    DistinguishabilityMatrix,
    NormalizedDistinguishability,
)

CLASSES = ("IO", "SIO", "FIO", "GIO", "pGIO")


def check_completeness(ops: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> None:
    d = ops[0].shape[0]
    total = sum(K.conj().T @ K for K in ops)
    if np.max(np.abs(total - np.eye(d))) > tol:
        raise ValidationError("Kraus operators violate sum K^dagger K = I")


def kraus_set(ops, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    ops = [as_matrix(K, square=True) for K in ops]
    if not ops:
        raise ValidationError("empty Kraus set")
    if len({K.shape for K in ops}) != 1:
        raise DimensionError("Kraus operators have different shapes")
    check_completeness(ops, tol)
    return ops


@dataclass(frozen=True)
class PgioChannel:
    """Canonical pGIO Kraus form ``K_n = sum_i c_n^i |sigma_i><i|``.

    ``coeffs[n, i]`` holds ``c_n^i``.
    """

    sigma: Permutation
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=np.complex128))
        if c.shape[1] != len(self.sigma):
            raise DimensionError(f"coefficient table width {c.shape[1]} != d={len(self.sigma)}")
        if np.max(np.abs((np.abs(c) ** 2).sum(axis=0) - 1)) > DEFAULT_TOL:
            raise ValidationError("sum_n |c_n^i|^2 must equal 1 for every i")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def kraus(self) -> list[np.ndarray]:
        d = len(self.sigma)
        P = np.zeros((d, d))
        P[self.sigma.as_array(), np.arange(d)] = 1.0
        return [P * c[None, :] for c in self.coeffs]


@dataclass(frozen=True)
class GramAction:
    """``rho -> (A * rho)[sigma][:, sigma]`` for a unit-diagonal PSD ``A``."""

    A: np.ndarray
    sigma: Permutation

    def __post_init__(self):
        A = DistinguishabilityMatrix(self.A).gram
        if A.shape[0] != len(self.sigma):
            raise DimensionError("action matrix and permutation sizes differ")
        object.__setattr__(self, "A", A)

    @property
    def N(self) -> int:
        return self.A.shape[0]


def apply_gram_action(rho, act: GramAction) -> np.ndarray:
    rho = as_matrix(rho, square=True)
    if rho.shape[0] != act.N:
        raise DimensionError(f"state is {rho.shape[0]}-dimensional, action is {act.N}")
    s = act.sigma.as_array()
    return (act.A * rho)[np.ix_(s, s)]


def apply_kraus(rho, ops: Sequence[np.ndarray]) -> np.ndarray:
    rho = as_matrix(rho, square=True)
    return sum(K @ rho @ K.conj().T for K in ops)


def kraus_to_gram_action(ch: PgioChannel) -> GramAction:
    """Equivalent Gram action of a canonical pGIO channel.

    ``K rho K^dagger`` puts ``c^i conj(c^j) rho_ij`` at ``(sigma_i, sigma_j)``,
    so ``A_ij = sum_n c_n^i conj(c_n^j)`` and the action reads its source
    entries through ``sigma^{-1}``.
    """
    c = ch.coeffs
    A = c.T @ c.conj()
    return GramAction(A, ch.sigma.inverse())


def channel_to_target(target: NormalizedDistinguishability) -> GramAction:
    """Gram action taking the zero-phase maximally coherent state to ``target``.

    With ``rho_M = J/N`` the action output is ``A/N``, so ``A = N * target.rho``.
    """
    N = target.N
    return GramAction(N * target.rho, Permutation.identity(N))


def hadamard_extend(S: DistinguishabilityMatrix, S_extra: DistinguishabilityMatrix) -> DistinguishabilityMatrix:
    """Attach extra internal degrees of freedom: ``S * S_extra`` entrywise."""
    if S.N != S_extra.N:
        raise DimensionError(f"cannot extend N={S.N} with N={S_extra.N}")
    return DistinguishabilityMatrix(S.gram * S_extra.gram)


def gram_action_to_json(act: GramAction) -> dict:
    return {"sigma": list(act.sigma.image), "A": matrix_to_json(act.A)}


def gram_action_from_json(obj: dict) -> GramAction:
    try:
        return GramAction(matrix_from_json(obj["A"]), Permutation(tuple(obj["sigma"])))
    except KeyError as exc:
        raise ValidationError(f"GramAction JSON missing field {exc}") from None


def pgio_channel_from_json(obj: dict) -> PgioChannel:
    try:
        coeffs = np.array(
            [[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in row]
             for row in obj["coeffs"]]
        )
        return PgioChannel(Permutation(tuple(obj["sigma"])), coeffs)
    except KeyError as exc:
        raise ValidationError(f"PgioChannel JSON missing field {exc}") from None


# --- classification ------------------------------------------------------------


def _support(K: np.ndarray, tol: float) -> np.ndarray:
    scale = max(np.max(np.abs(K)), 1.0)
    return np.abs(K) > tol * scale


def classify(ops, tol: float = DEFAULT_TOL) -> frozenset[str]:
    """Incoherent-operation classes a Kraus set belongs to, by support structure.

    * IO: every ``K_n`` has at most one nonzero per column.
    * SIO: additionally at most one nonzero per row (injective support map).
    * FIO: all ``K_n`` agree on the row index used by each column.
    * GIO: every ``K_n`` diagonal.
    * pGIO: one permutation ``sigma`` carries the support of every ``K_n``.

    pGIO implies SIO and FIO. The converse needs the shared map to be
    injective; a shared map that merges columns which never co-occur in one
    operator (e.g. ``{|0><0|, |0><1|}``) is SIO and FIO but not pGIO.
    """
    ops = kraus_set(ops, tol)
    d = ops[0].shape[0]
    supports = [_support(K, tol) for K in ops]
    out = set()

    io = all(np.all(s.sum(axis=0) <= 1) for s in supports)
    if not io:
        return frozenset()
    out.add("IO")

    if all(np.all(s.sum(axis=1) <= 1) for s in supports):
        out.add("SIO")

    union = np.logical_or.reduce(supports)
    shared = bool(np.all(union.sum(axis=0) <= 1))
    if shared:
        out.add("FIO")

    if all(not np.any(s & ~np.eye(d, dtype=bool)) for s in supports):
        out.add("GIO")

    # every column is used by some K_n (completeness), so union fixes f totally
    if shared and "SIO" in out:
        f = union.argmax(axis=0)
        if len(set(f.tolist())) == d:
            out.add("pGIO")
    return frozenset(out)
