"""Distinguishability (Gram) matrices of photon internal states and their density-matrix form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionError, ValidationError, as_matrix

HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-10
PSD_FLOOR = 1e-8


def _check_gram(gram: np.ndarray) -> None:
    n = gram.shape[0]
    if np.max(np.abs(gram - gram.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ValidationError("distinguishability matrix is not Hermitian")
    if np.max(np.abs(gram), initial=0.0) > 1 + HERMITIAN_TOL:
        raise ValidationError("distinguishability matrix has an entry with modulus > 1")
    if n and np.linalg.eigvalsh(gram).min() < -PSD_FLOOR * n:
        raise ValidationError("distinguishability matrix is not positive semidefinite")


def _unit_diagonal(gram: np.ndarray) -> np.ndarray:
    d = gram.diagonal().real
    if np.any(d <= 0):
        raise ValidationError("distinguishability matrix needs a positive diagonal")
    scale = 1.0 / np.sqrt(d)
    out = gram * scale[:, None] * scale[None, :]
    out = 0.5 * (out + out.conj().T)
    np.fill_diagonal(out, 1.0)
    return out


@dataclass(frozen=True)
class DistinguishabilityMatrix:
    """Hermitian PSD unit-diagonal Gram matrix ``S_ij = <phi_i|phi_j>``.

    The diagonal is rescaled to exactly one on construction; entries that
    were already unit-diagonal up to rounding are otherwise left alone.
    """

    gram: np.ndarray

    def __post_init__(self):
        gram = as_matrix(self.gram, square=True)
        if np.max(np.abs(gram.diagonal() - 1), initial=0.0) > 1e-6:
            raise ValidationError("distinguishability matrix must have unit diagonal")
        if np.max(np.abs(gram - gram.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValidationError("distinguishability matrix is not Hermitian")
        gram = _unit_diagonal(gram)
        _check_gram(gram)
        gram.setflags(write=False)
        object.__setattr__(self, "gram", gram)

    @property
    def N(self) -> int:
        return self.gram.shape[0]


@dataclass(frozen=True)
class NormalizedDistinguishability:
    """Density matrix ``rho = conj(S) / N``."""

    rho: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho, square=True)
        n = rho.shape[0]
        if abs(np.trace(rho) - 1) > 1e-10:
            raise ValidationError("density matrix must have unit trace")
        if np.max(np.abs(rho.diagonal() - 1.0 / n), initial=0.0) > 1e-10:
            raise ValidationError("normalized distinguishability needs diagonal 1/N")
        _check_gram(rho * n)
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def N(self) -> int:
        return self.rho.shape[0]

    def source(self) -> DistinguishabilityMatrix:
        return DistinguishabilityMatrix(self.N * self.rho.conj())


def validate_states(states) -> np.ndarray:
    """Check an internal-state set, one unit vector per row ``(N, d)``."""
    arr = np.asarray(states, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise DimensionError(f"internal states must be an (N, d) array, got {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    if np.max(np.abs(norms - 1), initial=0.0) > NORM_TOL:
        raise ValidationError("internal states must be normalized")
    return arr


def gram_from_states(states) -> DistinguishabilityMatrix:
    """``S_ij = <phi_i|phi_j>`` from rows ``phi_i`` of ``states``."""
    phi = validate_states(states)
    return DistinguishabilityMatrix(phi.conj() @ phi.T)


def states_from_gram(S: DistinguishabilityMatrix) -> np.ndarray:
    """Internal states (rows) realizing ``S``, from its eigen-factorization.

    Returns an ``(N, N)`` array ``phi`` with ``phi.conj() @ phi.T == S``.
    """
    w, v = np.linalg.eigh(S.gram)
    w = np.clip(w, 0.0, None)
    # S = v w v^dagger = conj(phi) phi^T with phi = conj(v sqrt(w))
    phi = (v * np.sqrt(w)).conj()
    return phi / np.linalg.norm(phi, axis=1, keepdims=True)


def interpolation_family(N: int, x: float) -> DistinguishabilityMatrix:
    """Unit diagonal with every off-diagonal entry equal to ``x``."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"x must lie in [0, 1], got {x}")
    gram = np.full((N, N), float(x), dtype=np.complex128)
    np.fill_diagonal(gram, 1.0)
    return DistinguishabilityMatrix(gram)


def maximally_coherent(N: int, thetas=None) -> NormalizedDistinguishability:
    thetas = np.zeros(N) if thetas is None else np.asarray(thetas, dtype=float)
    if thetas.shape != (N,):
        raise DimensionError(f"need {N} phases, got shape {thetas.shape}")
    psi = np.exp(1j * thetas)
    return NormalizedDistinguishability(np.outer(psi, psi.conj()) / N)


def normalize(S: DistinguishabilityMatrix) -> NormalizedDistinguishability:
    return NormalizedDistinguishability(S.gram.conj() / S.N)
