"""Command-line front end.

Exit codes: 0 ok, 2 validation failure, 3 invariant or oracle mismatch,
4 I/O error. ``PERMCOH_THREADS`` caps the worker count of the subset loops.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import generators as gen
from .core import CapacityError, DimensionError, ValidationError, matrix_from_json, matrix_to_json
from .distinguishability import (
    DistinguishabilityMatrix,
    gram_from_states,
    interpolation_family,
    normalize,
)
from .monotones import any_increase, monotone_report
from .pgio import apply_gram_action, gram_action_from_json
from .transition import (
    InvariantError,
    bounds,
    probability_bruteforce,
    probability_inclusion_exclusion,
    probability_indistinguishable,
    probability_pruned,
    probability_truncated,
    scattering_matrix,
)
from .verify import HOM, format_table, run_all

EXIT_OK, EXIT_VALIDATION, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("PERMCOH_THREADS", "1")))
    except ValueError:
        return 1


def _meta(args, seed) -> dict:
    return {
        "version": _version(),
        "seed": seed,
        "rng": gen.RNG_ALGORITHM,
        "command_line": " ".join(sys.argv),
    }


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


def _load_gram(args, N: int | None) -> DistinguishabilityMatrix | None:
    if args.gram:
        return DistinguishabilityMatrix(matrix_from_json(_read_json(args.gram)))
    if args.states:
        obj = _read_json(args.states)
        states = matrix_from_json(obj) if isinstance(obj, dict) else np.array(
            [[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in obj])
        return gram_from_states(states)
    if args.interp is not None:
        if N is None:
            raise ValidationError("--interp needs --input or --photons to fix N")
        return interpolation_family(N, args.interp)
    return None


def _default_occ(M: int, N: int) -> tuple[int, ...]:
    return tuple([1] * N + [0] * (M - N))


def cmd_probability(args) -> int:
    seed = args.seed
    if args.preset == "hom":
        U = HOM
        n = m = (1, 1)
        S = interpolation_family(2, 1.0 if args.interp is None else args.interp)
    elif args.preset == "appendixB":
        U = gen.haar_unitary(4, seed)
        n = m = (1, 1, 1, 1)
        S = gen.sparse_four_photon_gram()
    elif args.preset == "figure2":
        U = gen.haar_unitary(8, seed)
        n = m = (1,) * 8
        S = gen.random_gram_with_sparsity(8, args.nnz, seed)
    else:
        if args.unitary:
            U = matrix_from_json(_read_json(args.unitary))
        elif args.haar:
            U = gen.haar_unitary(args.haar, seed)
        else:
            raise ValidationError("need --unitary FILE, --haar M or --preset")
        M = U.shape[0]
        n = _int_list(args.input) if args.input else None
        N = sum(n) if n else args.photons
        S = _load_gram(args, N)
        if S is None:
            S = gen.random_gram(N or M, seed)
        n = n or _default_occ(M, S.N)
        m = _int_list(args.output) if args.output else n
    V = scattering_matrix(U, n, m)
    algo = args.algo
    if algo == "brute":
        report = probability_bruteforce(V, S)
    elif algo == "ie":
        report = probability_inclusion_exclusion(V, S, workers=_threads())
    elif algo == "pruned":
        report = probability_pruned(V, S, workers=_threads())
    elif algo == "indist":
        report = probability_indistinguishable(V)
    elif algo.startswith("trunc:"):
        report = probability_truncated(V, S, int(algo.split(":", 1)[1]))
    else:
        raise ValidationError(f"unknown algorithm {algo!r}")
    if args.bounds:
        report.bounds = bounds(V, S, probability=report.probability)
    out = report.to_dict()
    out["input"], out["output"] = list(n), list(m)
    out["metadata"] = _meta(args, seed)
    print(json.dumps(out, indent=2, default=_jsonable))
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sweep_rows(N: int, seed: int) -> list[dict]:
    V = gen.haar_unitary(N, seed)
    rows = []
    for nnz in gen.achievable_nonzero_counts(N):
        S = gen.random_gram_with_sparsity(N, nnz, seed)
        rep = probability_inclusion_exclusion(V, S, workers=_threads())
        rows.append({
            "nnz": nnz,
            "op_count": rep.op_count,
            "measured_multiplies": rep.measured_multiplies,
            "probability": repr(rep.probability),
            "seed": seed,
        })
    return rows


def cmd_benchmark_figure2(args) -> int:
    if args.photons > 12:
        raise ValidationError("figure-2 sweep is capped at N=12")
    rows = sweep_rows(args.photons, args.seed)
    try:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        meta = _meta(args, args.seed) | {"N": args.photons, "generator": "random_gram_with_sparsity",
                                          "unitary": "haar_unitary", "csv": args.out}
        with open(args.out + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=2)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps({"rows": len(rows), "max_op_count": max(r["op_count"] for r in rows),
                      "csv": args.out, "metadata": meta}, indent=2))
    return EXIT_OK


def cmd_pgio(args) -> int:
    if args.random_action is not None:
        seeds = list(range(args.random_action, args.random_action + args.sweep))
    else:
        seeds = [None]
    first_report, first_violation, violations = None, None, 0
    for s in seeds:
        if args.gram:
            S = DistinguishabilityMatrix(matrix_from_json(_read_json(args.gram)))
        elif args.interp is not None:
            S = interpolation_family(args.photons, args.interp)
        else:
            S = gen.random_gram(args.photons, args.seed if s is None else s + 10_000)
        if args.action:
            act = gram_action_from_json(_read_json(args.action))
        elif s is not None:
            act = gen.random_gram_action(S.N, s)
        else:
            raise ValidationError("need --action FILE or --random-action SEED")
        after = DistinguishabilityMatrix(S.N * apply_gram_action(normalize(S).rho, act).conj())
        report = monotone_report(S, after)
        first_report = first_report or report
        if any_increase(report):
            violations += 1
            if first_violation is None:
                first_violation = {"report": report, "S": matrix_to_json(S.gram),
                                   "A": matrix_to_json(act.A), "sigma": list(act.sigma.image)}
    seed = args.random_action if args.random_action is not None else args.seed
    out = {"report": first_report, "cases": len(seeds), "violations": violations,
           "metadata": _meta(args, seed)}
    if first_violation:
        out["first_violation"] = first_violation
    print(json.dumps(out, indent=2, default=_jsonable))
    return EXIT_INVARIANT if violations else EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(args.scale)
    print(format_table(results))
    failed = [r for r in results if not r.ok]
    if failed:
        print(json.dumps({"first_failure": failed[0].name, "replay": failed[0].replay},
                         indent=2, default=_jsonable))
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="permcoh", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def gram_flags(sp):
        sp.add_argument("--gram", help="distinguishability matrix JSON")
        sp.add_argument("--states", help="internal states JSON, one row per photon")
        sp.add_argument("--interp", type=float, help="interpolation family overlap x")
        sp.add_argument("--photons", type=int, help="photon number N")

    pr = sub.add_parser("probability", help="transition probability report")
    pr.add_argument("--preset", choices=["hom", "appendixB", "figure2"])
    pr.add_argument("--unitary", help="unitary matrix JSON")
    pr.add_argument("--haar", type=int, metavar="M", help="Haar-random M x M unitary")
    pr.add_argument("--seed", type=int, default=0)
    gram_flags(pr)
    pr.add_argument("--input", help="input occupations, comma separated")
    pr.add_argument("--output", help="output occupations, comma separated")
    pr.add_argument("--algo", default="brute", help="brute | ie | pruned | indist | trunc:k")
    pr.add_argument("--bounds", action="store_true")
    pr.add_argument("--nnz", type=int, default=64, help="nonzero count for --preset figure2")
    pr.set_defaults(func=cmd_probability)

    bf = sub.add_parser("benchmark-figure2", help="op-count sweep over achievable nonzero counts")
    bf.add_argument("--photons", type=int, default=8)
    bf.add_argument("--seed", type=int, default=0)
    bf.add_argument("--out", default="figure2.csv")
    bf.set_defaults(func=cmd_benchmark_figure2)

    pg = sub.add_parser("pgio", help="monotone report under a Gram action")
    gram_flags(pg)
    pg.set_defaults(photons=4)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--action", help="GramAction JSON {sigma, A}")
    pg.add_argument("--random-action", type=int, metavar="SEED")
    pg.add_argument("--sweep", type=int, default=1, help="number of consecutive seeds")
    pg.set_defaults(func=cmd_pgio)

    vf = sub.add_parser("verify", help="cross-oracle verification table")
    vf.add_argument("--scale", choices=["small", "full"], default="small")
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DimensionError, CapacityError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
