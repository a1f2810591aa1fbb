"""Error of the k-photon-interference truncation P_k on the interpolation family."""

import argparse

import numpy as np

from permcoh.distinguishability import interpolation_family
from permcoh.generators import haar_unitary
from permcoh.monotones import valid_grades
from permcoh.transition import probability_bruteforce, probability_truncated


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--photons", type=int, default=6)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=1000)
    p.add_argument("--target", type=float, default=1e-3, help="relative error threshold")
    p.add_argument("--xs", default="0.1,0.3,0.5,0.7,0.9")
    args = p.parse_args()

    N = args.photons
    grades = valid_grades(N)
    print(f"{'x':>4} {'mean k':>7} {'non-monotone':>13}  mean relative error per k {grades}")
    for x in (float(t) for t in args.xs.split(",")):
        S = interpolation_family(N, x)
        errs, ks, bad = [], [], 0
        for i in range(args.instances):
            V = haar_unitary(N, args.seed + i)
            P = probability_bruteforce(V, S, check_double_sum=False).probability
            e = [abs(P - probability_truncated(V, S, k).probability) / P for k in grades]
            errs.append(e)
            bad += any(b > a for a, b in zip(e, e[1:]))
            ks.append(next(k for k, v in zip(grades, e) if v <= args.target))
        mean = " ".join(f"{v:.1e}" for v in np.mean(errs, axis=0))
        print(f"{x:>4} {np.mean(ks):>7.2f} {bad:>13}  {mean}")


if __name__ == "__main__":
    main()
