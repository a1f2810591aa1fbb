"""Partially distinguishable boson sampling: exact and approximate transition
probabilities, pGIO actions on distinguishability matrices, and coherence
monotones."""

from .core import OccupationVector, Permutation
from .distinguishability import (
    DistinguishabilityMatrix,
    NormalizedDistinguishability,
    gram_from_states,
    interpolation_family,
    maximally_coherent,
    normalize,
)
from .transition import (
    TransitionReport,
    bounds,
    probability_bruteforce,
    probability_inclusion_exclusion,
    probability_indistinguishable,
    probability_pruned,
    probability_truncated,
    z_decomposition,
)

__all__ = [
    "DistinguishabilityMatrix",
    "NormalizedDistinguishability",
    "OccupationVector",
    "Permutation",
    "TransitionReport",
    "bounds",
    "gram_from_states",
    "interpolation_family",
    "maximally_coherent",
    "normalize",
    "probability_bruteforce",
    "probability_inclusion_exclusion",
    "probability_indistinguishable",
    "probability_pruned",
    "probability_truncated",
    "z_decomposition",
]
