"""Shared matrix, permutation and occupation primitives."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
FACTORIAL_CUTOFF = 10


class DimensionError(ValueError):
    """Raised when matrix or vector shapes are incompatible."""


class CapacityError(ValueError):
    """Raised when an enumeration would exceed a configured size cutoff."""


class ValidationError(ValueError):
    """Raised when an input violates a type invariant."""


def as_matrix(mat, *, square: bool = False) -> np.ndarray:
    """Coerce ``mat`` to a finite 2-D complex128 array."""
    arr = np.asarray(mat, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``{0..N-1}`` stored as its image, ``sigma(i) = image[i]``."""

    image: tuple[int, ...]
    fixed_point_count: int = field(init=False, compare=False)

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValidationError(f"{image} is not a permutation of 0..{len(image) - 1}")
        object.__setattr__(self, "image", image)
        object.__setattr__(
            self, "fixed_point_count", sum(1 for i, s in enumerate(image) if i == s)
        )

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.image)

    def __getitem__(self, i: int) -> int:
        return self.image[i]

    @property
    def moved(self) -> int:
        """Number of non-fixed points (the ``a`` in the fixed-point grading)."""
        return len(self.image) - self.fixed_point_count

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.image)
        for i, s in enumerate(self.image):
            inv[s] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Return ``self o other``, i.e. ``i -> self[other[i]]``."""
        return Permutation(tuple(self.image[j] for j in other.image))

    def as_array(self) -> np.ndarray:
        return np.array(self.image, dtype=np.intp)


@dataclass(frozen=True)
class OccupationVector:
    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(x) for x in self.occupations)
        if any(x < 0 for x in occ):
            raise ValidationError(f"negative occupation in {occ}")
        if sum(occ) < 1:
            raise ValidationError("occupation vector must contain at least one photon")
        object.__setattr__(self, "occupations", occ)

    @property
    def modes(self) -> int:
        return len(self.occupations)

    @property
    def photons(self) -> int:
        return sum(self.occupations)

    @property
    def collision_free(self) -> bool:
        return all(x in (0, 1) for x in self.occupations)

    def repeated_indices(self) -> list[int]:
        """Mode index ``i`` repeated ``occupations[i]`` times, in mode order."""
        return [i for i, k in enumerate(self.occupations) for _ in range(k)]


def occupation(values: Sequence[int] | OccupationVector) -> OccupationVector:
    if isinstance(values, OccupationVector):
        return values
    return OccupationVector(tuple(values))


def validate_unitary(mat, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max |mat mat^dagger - I| <= tol``."""
    arr = as_matrix(mat, square=True)
    dev = arr @ arr.conj().T - np.eye(arr.shape[0])
    return bool(np.max(np.abs(dev), initial=0.0) <= tol)


def submatrix_for_transition(U, n, m) -> np.ndarray:
    """Rows of ``U`` repeated per input occupation, columns per output occupation."""
    U = as_matrix(U, square=True)
    n, m = occupation(n), occupation(m)
    M = U.shape[0]
    if n.modes != M or m.modes != M:
        raise DimensionError(
            f"occupation vectors have {n.modes} and {m.modes} modes, unitary has {M}"
        )
    if n.photons != m.photons:
        raise DimensionError(
            f"photon number mismatch: input {n.photons}, output {m.photons}"
        )
    return U[np.ix_(n.repeated_indices(), m.repeated_indices())]


def enumerate_permutations(n: int, cutoff: int = FACTORIAL_CUTOFF) -> Iterator[Permutation]:
    """All ``n!`` permutations in lexicographic order."""
    if n > cutoff:
        raise CapacityError(f"N={n} exceeds the factorial cutoff {cutoff}")
    for image in itertools.permutations(range(n)):
        yield Permutation(image)


def derangement_count(n: int) -> int:
    d = [1, 0]
    for k in range(2, n + 1):
        d.append((k - 1) * (d[-1] + d[-2]))
    return d[n]


def permutations_with_moved(n: int, a: int) -> Iterator[Permutation]:
    """Permutations of ``n`` points moving exactly ``a`` of them, lexicographic order.

    Enumerates ``C(n, a) * D_a`` items directly instead of filtering ``S_n``.
    """
    out = []
    for support in itertools.combinations(range(n), a):
        for img in itertools.permutations(support):
            if any(s == t for s, t in zip(support, img)):
                continue
            image = list(range(n))
            for s, t in zip(support, img):
                image[s] = t
            out.append(tuple(image))
    for image in sorted(out):
        yield Permutation(image)


def count_with_moved(n: int, a: int) -> int:
    return math.comb(n, a) * derangement_count(a)


# --- JSON wire formats -------------------------------------------------------


def matrix_to_json(mat) -> dict:
    arr = as_matrix(mat)
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in arr],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"matrix JSON needs rows, cols, data: {exc}") from None
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValidationError(f"matrix JSON data does not match declared {rows}x{cols}")
    try:
        arr = np.array([[complex(e[0], e[1]) for e in row] for row in data])
    except (TypeError, IndexError, ValueError) as exc:
        raise ValidationError(f"matrix entries must be [re, im] pairs: {exc}") from None
    return as_matrix(arr.reshape(rows, cols))
