"""Pruned inclusion-exclusion on the four-photon instance with three vanishing overlaps."""

import argparse

from permcoh.generators import sparse_four_photon_gram, haar_unitary
from permcoh.transition import probability_inclusion_exclusion, probability_pruned


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--overlap", type=complex, default=0.3)
    args = p.parse_args()

    V = haar_unitary(4, args.seed)
    S = sparse_four_photon_gram(args.overlap)
    base = probability_inclusion_exclusion(V, S)
    pruned = probability_pruned(V, S)
    d = pruned.details

    print("vanishing (R, S) pairs, one per conjugate class:")
    for pair in d["vanishing_pairs"]:
        print(f"  R={pair['R']!s:<8} S={pair['S']!s:<8} terms={pair['terms']}")
    print(f"ordered pairs skipped by the loop: {d['ordered_vanishing_pairs']}")
    print(f"baseline count : {d['baseline_count']}")
    print(f"skipped terms  : {d['skipped_terms']}")
    print(f"pruned count   : {d['pruned_count']}")
    print(f"P (full)       : {base.probability:.15e}")
    print(f"P (pruned)     : {pruned.probability:.15e}")
    print(f"measured multiplies full/pruned: {base.measured_multiplies} / {pruned.measured_multiplies}")


if __name__ == "__main__":
    main()
