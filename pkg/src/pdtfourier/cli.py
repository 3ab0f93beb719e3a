"""Command-line front end.

Exit codes: 0 success / inequality holds, 1 violation or tree does not compute
the function, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import boolfn, bounds, gf2, oracle, pdt
from .bounds import fmt
from .suite import SuiteConfig, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def load_function(ref: str) -> boolfn.BooleanFunction:
    if ref.startswith("builtin:"):
        try:
            return boolfn.parse_builtin(ref[len("builtin:"):])
        except ValueError as e:
            raise UsageError(str(e)) from None
    try:
        with open(ref) as fh:
            return boolfn.from_text(fh.read())
    except OSError as e:
        raise UsageError(f"cannot read {ref}: {e.strerror}") from None
    except ValueError as e:
        raise UsageError(f"{ref}: {e}") from None


def load_tree(ref: str) -> pdt.ParityDecisionTree:
    try:
        with open(ref) as fh:
            return pdt.parse(fh.read())
    except OSError as e:
        raise UsageError(f"cannot read {ref}: {e.strerror}") from None
    except ValueError as e:
        raise UsageError(f"{ref}: {e}") from None


def _subset(mask: int) -> str:
    return "{" + ",".join(str(i) for i in gf2.indices_from_mask(mask)) + "}"


def _point(x: int, n: int) -> str:
    return "(" + ",".join("-1" if (x >> i) & 1 else "+1" for i in range(n)) + ")"


def _not_computing(out, f, t, witness: int) -> int:
    label, path = pdt.eval_tree(t, witness)
    print(f"tree does not compute the function: at x={_point(witness, f.n)} "
          f"(code {witness}) f={f(witness):+d} but leaf {path!r} outputs {label:+d}", file=out)
    return EXIT_VIOLATION


# ---------------------------------------------------------------- commands


def cmd_spectrum(args, out) -> int:
    f = load_function(args.function)
    try:
        spec = boolfn.spectrum(f)
    except boolfn.ArityError as e:
        raise UsageError(str(e)) from None
    items = sorted(spec.nonzero(), key=lambda kv: (bin(kv[0]).count("1"), gf2.indices_from_mask(kv[0])))
    print(f"n={f.n}", file=out)
    for mask, value in items:
        print(f"fhat({_subset(mask)}) = {value}", file=out)
    print(f"sum_linear = {spec.linear_sum()}", file=out)
    print(f"degree = {spec.degree()}", file=out)
    return EXIT_OK


def _stats_lines(t: pdt.ParityDecisionTree) -> list[str]:
    s = pdt.tree_stats(t)
    cf = pdt.is_correlation_free(t)
    lines = [
        f"depth = {s.depth}",
        f"average_depth = {s.average_depth}",
        f"second_moment = {s.second_moment}",
        f"first_abs_moment = {s.first_abs_moment}",
        f"correlation_free = {cf.ok}",
    ]
    if not cf.ok:
        lines.append(f"correlated_witness = leaf {cf.leaf_id!r} pair {{{cf.pair[0]},{cf.pair[1]}}}")
    return lines


def _leaf_lines(t: pdt.ParityDecisionTree) -> list[str]:
    lines = ["leaf\tlabel\tmass\tpath_length\tvector\tcorrelated"]
    for s in pdt.leaf_summaries(t):
        pairs = ",".join(f"{{{i + 1},{j + 1}}}" for i, j in sorted(s.summary.correlated_pairs))
        vec = "(" + ",".join(str(v) for v in s.vector) + ")"
        lines.append(f"{s.leaf_id or '.'}\t{s.label:+d}\t{s.mass}\t{s.path_length}\t{vec}\t{pairs or '-'}")
    return lines


def cmd_pdt_stats(args, out) -> int:
    t = load_tree(args.tree)
    for line in _stats_lines(t) + _leaf_lines(t):
        print(line, file=out)
    return EXIT_OK


def cmd_refine(args, out) -> int:
    t = load_tree(args.tree)
    r = pdt.refine_correlation_free(t)
    print(pdt.serialize(r), end="", file=out)
    print("# before", file=out)
    for line in _stats_lines(t):
        print(line, file=out)
    print("# after", file=out)
    for line in _stats_lines(r):
        print(line, file=out)
    return EXIT_OK


def _write_report(path, payload) -> None:
    if path:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def cmd_check(args, out) -> int:
    f = load_function(args.function)
    t = load_tree(args.tree)
    if f.n != t.n:
        raise UsageError(f"function has n={f.n} but tree has n={t.n}")
    computes = pdt.computes(t, f)
    if not computes:
        return _not_computing(out, f, t, computes.witness)
    if args.which == "entropy":
        try:
            rep = bounds.entropy_chain(f, t)
        except bounds.ConstantFunctionError as e:
            raise UsageError(str(e)) from None
        print(f"mu = {rep.mu}", file=out)
        print(f"h_given_f = {fmt(rep.h_given_f)}", file=out)
        print(f"h_given_leaf = {fmt(rep.h_given_leaf)}", file=out)
        print(f"eq1_bound = {fmt(rep.eq1_bound)}", file=out)
        print(f"eq3_bound = {fmt(rep.eq3_bound)}", file=out)
        for link in rep.links:
            print(link.line(), file=out)
        _write_report(args.report, rep.as_dict())
        return EXIT_OK if rep.holds else EXIT_VIOLATION
    if args.which == "lemma1":
        rep = bounds.lemma1_check(t)
    else:
        rep = {"theorem1": bounds.theorem1_check, "theorem4": bounds.theorem4_check,
               "lemma3": bounds.lemma3_check}[args.which](f, t)
    print(rep.line(), file=out)
    rel = "≤" if rep.holds else ">"
    tail = "holds" + (" with equality" if rep.equality else "") if rep.holds else "VIOLATED"
    print(f"{rep.name}: {fmt(float(rep.lhs))} {rel} {fmt(float(rep.rhs))} ({tail})", file=out)
    _write_report(args.report, rep.as_dict())
    return EXIT_OK if rep.holds else EXIT_VIOLATION


def cmd_recmaj(args, out) -> int:
    k = args.k
    if k < 1:
        raise UsageError("--k must be at least 1")
    total = bounds.recmaj_linear_sum(k)
    bound = bounds.recmaj_depth_bound(k)
    print(f"k = {k}", file=out)
    print(f"n = {3 ** k}", file=out)
    print(f"linear_sum = {total}", file=out)
    print(f"depth_lower_bound = {bound}", file=out)
    if 3 ** k > boolfn.MAX_ARITY:
        print("streamed_verification = skipped (arity above 27)", file=out)
        return EXIT_OK
    f = boolfn.recursive_majority(k)
    streamed = bounds.linear_sum(f)
    streamed_bound = bounds.depth_lower_bound(f)
    ok = streamed == total and streamed_bound == bound
    print(f"streamed_linear_sum = {streamed}", file=out)
    print(f"streamed_depth_lower_bound = {streamed_bound}", file=out)
    print(f"streamed_verification = {'ok' if ok else 'MISMATCH'}", file=out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_solve(args, out) -> int:
    f = load_function(args.function)
    if f.n > oracle.SOLVER_MAX_N:
        raise UsageError(f"exact solver supports n <= {oracle.SOLVER_MAX_N}, got n={f.n}")
    d, cert = oracle.min_pdt_depth(f)
    plain_d, _ = oracle.min_dt_depth(f)
    print(f"min_pdt_depth = {d}", file=out)
    print(f"min_dt_depth = {plain_d}", file=out)
    if boolfn.variance(f):
        print(f"depth_lower_bound = {bounds.depth_lower_bound(f)}", file=out)
    print("certificate:", file=out)
    print(pdt.serialize(cert), end="", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    kw = {"seed": args.seed}
    if args.trials is not None:
        if args.trials <= 0:
            raise UsageError("--trials must be positive")
        small = max(1, args.trials // 10)
        kw.update(moment_trials=args.trials, entropy_trials=small, refine_trials=small,
                  split_trials=small, fourier_trials=max(1, args.trials // 100))
    report = run_suite(SuiteConfig(**kw))
    for line in report.lines():
        print(line, file=out)
    for c in report.counterexamples:
        print("counterexample: " + json.dumps(c, sort_keys=True), file=out)
    print("ALL PASS" if report.ok else "FAILURES", file=out)
    _write_report(args.report, {"checks": {k: {"passed": s.passed, "failed": s.failed,
                                                "equalities": s.equalities,
                                                "worst_slack": None if s.worst_slack is None
                                                else fmt(s.worst_slack)}
                                            for k, s in report.checks.items()},
                                "counterexamples": report.counterexamples})
    return EXIT_OK if report.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdtfourier", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="nonzero Fourier coefficients and the level-1 sum")
    s.add_argument("function", help="truth-table file or builtin:NAME[:ARGS]")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("pdt-stats", help="depth, moments, correlation-freeness, leaf table")
    s.add_argument("tree")
    s.set_defaults(func=cmd_pdt_stats)

    s = sub.add_parser("refine", help="correlation-free refinement with before/after stats")
    s.add_argument("tree")
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("check", help="check one inequality for a (function, tree) pair")
    s.add_argument("--which", required=True,
                   choices=["theorem1", "theorem4", "lemma1", "lemma3", "entropy"])
    s.add_argument("--report", help="also write a JSON report here")
    s.add_argument("function")
    s.add_argument("tree")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("recmaj", help="level-1 sum and depth bound for recursive majority")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_recmaj)

    s = sub.add_parser("solve", help="exact minimum parity decision tree depth (n <= 4)")
    s.add_argument("function")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="run the seeded verification suite")
    s.add_argument("--seed", type=int, default=SuiteConfig.seed)
    s.add_argument("--trials", type=int, help="random trees for the second-moment suite (others scale)")
    s.add_argument("--report", help="also write a JSON summary here")
    s.set_defaults(func=cmd_verify)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except bounds.DoesNotCompute as e:
        print(f"error: {e}", file=out)
        return EXIT_VIOLATION


def main() -> None:
    sys.exit(run())
