"""Seeded verification suites: every property checked against brute force."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

from . import boolfn, bounds, gf2, oracle, pdt
from .boolfn import BooleanFunction
from .pdt import ParityDecisionTree
from .rng import SplitMix64

MAX_COUNTEREXAMPLES = 20


@dataclass(frozen=True)
class SuiteConfig:
    max_n_exhaustive: int = 3
    max_depth_exhaustive: int = 2
    max_n_random: int = 8
    max_depth_random: int = 5
    moment_trials: int = 100_000
    entropy_trials: int = 10_000
    refine_trials: int = 10_000
    split_trials: int = 10_000
    fourier_trials: int = 1_000
    fourier_max_n: int = 10
    parseval_trials: int = 200
    parseval_max_n: int = 12
    gf2_trials: int = 2_000
    grid_points: int = 1_000_000
    recmaj_max_k: int = 3
    seed: int = 0x5EED
    tolerance: float = 1e-9
    # multiplier in the second-moment bound; lowering it to 1 plants a known-false check
    moment_factor: int = 2

    def __post_init__(self):
        for name in ("moment_trials", "entropy_trials", "refine_trials", "split_trials",
                     "fourier_trials", "parseval_trials", "gf2_trials", "grid_points"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def rng(self, stream: str) -> SplitMix64:
        """Independent stream per check, derived from the seed and the check name."""
        salt = int.from_bytes(stream.encode()[:8].ljust(8, b"\0"), "little")
        return SplitMix64(self.seed ^ salt)


@dataclass
class CheckStats:
    name: str
    passed: int = 0
    failed: int = 0
    equalities: int = 0
    worst_slack: Optional[float] = None
    counterexamples: list = field(default_factory=list)

    def record(self, ok: bool, slack=None, equality: bool = False, payload=None):
        """``payload`` is a dict or a zero-argument callable, built only on failure."""
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if payload is not None and len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                if callable(payload):
                    payload = payload()
                self.counterexamples.append({"check": self.name, **payload})
        if equality:
            self.equalities += 1
        if slack is not None and (self.worst_slack is None or slack < self.worst_slack):
            self.worst_slack = slack

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0

    def line(self) -> str:
        slack = "-" if self.worst_slack is None else bounds.fmt(self.worst_slack)
        verdict = "PASS" if self.ok else "FAIL"
        return (f"{verdict}\t{self.name}\tpassed={self.passed}\tfailed={self.failed}"
                f"\tequalities={self.equalities}\tworst_slack={slack}")


@dataclass
class SuiteReport:
    checks: dict = field(default_factory=dict)

    def add(self, *stats: CheckStats) -> None:
        for s in stats:
            self.checks[s.name] = s

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.checks.values())

    @property
    def counterexamples(self) -> list:
        return [c for s in self.checks.values() for c in s.counterexamples]

    def lines(self) -> list[str]:
        return [s.line() for s in self.checks.values()]


def _payload(f: Optional[BooleanFunction] = None, t: Optional[ParityDecisionTree] = None,
             **detail) -> dict:
    out = {}
    if f is not None:
        out["function"] = boolfn.to_text(f)
    if t is not None:
        out["tree"] = pdt.serialize(t)
    out.update({k: str(v) for k, v in detail.items()})
    return out


def _random_shape(cfg: SuiteConfig, rng: SplitMix64) -> tuple[int, int, int]:
    n = rng.between(1, cfg.max_n_random)
    d = rng.between(0, cfg.max_depth_random)
    return n, d, rng.next()


def random_trees(cfg: SuiteConfig, stream: str, count: int):
    rng = cfg.rng(stream)
    for _ in range(count):
        n, d, seed = _random_shape(cfg, rng)
        yield oracle.random_pdt(n, d, seed)


def exhaustive_trees(cfg: SuiteConfig):
    for n in range(1, cfg.max_n_exhaustive + 1):
        yield from oracle.all_trees(n, cfg.max_depth_exhaustive)


# ------------------------------------------------------------------- gf2


def check_gf2_systems(cfg: SuiteConfig) -> CheckStats:
    """Reduced-basis readoff versus enumeration of every point, n <= 4."""
    st = CheckStats("gf2_systems")
    rng = cfg.rng("gf2")
    for _ in range(cfg.gf2_trials):
        n = rng.between(1, 4)
        k = rng.between(0, 5)
        rows = tuple(rng.below(1 << n) for _ in range(k))
        rhs = tuple(rng.below(2) for _ in range(k))
        system = gf2.AffineSystem(gf2.BitMatrix(n, rows), rhs)
        summ = gf2.analyze_system(system)
        sols = [x for x in range(1 << n)
                if all(gf2.parity(r & x) == b for r, b in zip(rows, rhs))]
        ok = summ.rank == gf2.rank(system.matrix) <= min(k, n)
        ok &= summ.consistent == bool(sols)
        if sols:
            ok &= len(sols) == 1 << (n - summ.rank)
            forced = {i: (sols[0] >> i) & 1 for i in range(n)
                      if all(((x >> i) & 1) == ((sols[0] >> i) & 1) for x in sols)}
            pairs = set()
            for i, j in combinations(range(n), 2):
                same = all(((x >> i) ^ (x >> j)) & 1 == ((sols[0] >> i) ^ (sols[0] >> j)) & 1
                           for x in sols)
                if same and i not in forced:
                    pairs.add((i, j))
            ok &= summ.forced == forced and set(summ.correlated_pairs) == pairs
        st.record(ok, payload=None if ok else {"rows": rows, "rhs": rhs, "n": n})
    return st


# ---------------------------------------------------------------- fourier


def check_fourier(cfg: SuiteConfig) -> CheckStats:
    st = CheckStats("fourier_fast_vs_brute")
    rng = cfg.rng("fourier")
    funcs = list(oracle.enumerate_functions(3))
    funcs += [oracle.random_function(rng.between(1, cfg.fourier_max_n), rng)
              for _ in range(cfg.fourier_trials)]
    for f in funcs:
        fast = boolfn.spectrum(f)
        brute = oracle.brute_force_spectrum(f)
        ok = fast == brute and fast.inverse() == f
        ok &= boolfn.linear_scaled(f) == [brute[1 << i] for i in range(f.n)]
        st.record(ok, payload=None if ok else lambda: _payload(f))
    return st


def check_parseval(cfg: SuiteConfig) -> CheckStats:
    st = CheckStats("parseval")
    rng = cfg.rng("parseval")
    for _ in range(cfg.parseval_trials):
        f = oracle.random_function(rng.between(1, cfg.parseval_max_n), rng)
        ok = boolfn.spectrum(f).parseval() == 4 ** f.n
        st.record(ok, payload=None if ok else lambda: _payload(f))
    return st


def check_recmaj(cfg: SuiteConfig) -> CheckStats:
    st = CheckStats("recmaj_linear_sum")
    for k in range(1, cfg.recmaj_max_k + 1):
        f = boolfn.recursive_majority(k)
        streamed = bounds.linear_sum(f)
        expected = Fraction(3, 2) ** k
        ok = streamed == expected == bounds.recmaj_linear_sum(k)
        ok &= bounds.depth_lower_bound(f) == bounds.recmaj_depth_bound(k)
        st.record(ok, payload=None if ok else {"k": k, "streamed": str(streamed)})
    return st


def check_composition_identity(cfg: SuiteConfig) -> CheckStats:
    """Composed level-1 coefficients against products of brute-force coefficients."""
    st = CheckStats("composition_level1_identity")
    brute_lin = {}

    def lin(f):
        key = (f.n, f.table_code())
        if key not in brute_lin:
            brute_lin[key] = [Fraction(c, f.size) for c in oracle.brute_linear(f)]
        return brute_lin[key]

    outers = [f for m in range(1, cfg.max_n_exhaustive + 1) for f in oracle.enumerate_functions(m)]
    inners = [g for n in range(1, cfg.max_n_exhaustive + 1)
              for g in oracle.enumerate_functions(n) if boolfn.is_balanced(g)]
    for f in outers:
        fl = lin(f)
        for g in inners:
            gl = lin(g)
            composed = boolfn.linear_coefficients(boolfn.compose(f, g))
            ok = all(composed[i * g.n + j] == fl[i] * gl[j]
                     for i in range(f.n) for j in range(g.n))
            st.record(ok, payload=None if ok else {"f": boolfn.to_text(f), "g": boolfn.to_text(g)})
    return st


# ---------------------------------------------------------- tree moments


def _tree_properties(trees, cfg: SuiteConfig, suffix: str, with_oracle: bool):
    lem = CheckStats(f"second_moment_{suffix}")
    cfree = CheckStats(f"correlation_free_{suffix}")
    avg = CheckStats(f"avg_depth_{suffix}")
    plain = CheckStats(f"plain_tree_{suffix}")
    leaves = CheckStats(f"leaf_vectors_{suffix}")
    for t in trees:
        s = pdt.tree_stats(t)
        bound = cfg.moment_factor * s.depth
        lem.record(s.second_moment <= bound, bound - s.second_moment,
                   s.second_moment == bound, lambda: _payload(t=t, second_moment=s.second_moment))
        avg.record(s.second_moment <= 2 * s.average_depth,
                   2 * s.average_depth - s.second_moment,
                   s.second_moment == 2 * s.average_depth, lambda: _payload(t=t))
        if s.correlation_free:
            cfree.record(s.second_moment <= s.depth, s.depth - s.second_moment,
                         s.second_moment == s.depth, lambda: _payload(t=t))
        if s.plain:
            plain.record(s.second_moment <= s.depth, s.depth - s.second_moment,
                         s.second_moment == s.depth, lambda: _payload(t=t))
        if with_oracle:
            leaves.record(_leaf_vectors_match(t), payload=lambda: _payload(t=t))
    out = [lem, cfree, avg, plain]
    return out + [leaves] if with_oracle else out


def _leaf_vectors_match(t: ParityDecisionTree) -> bool:
    summaries = pdt.leaf_summaries(t)
    means = oracle.leaf_mean_vectors(t)
    if sum(s.mass for s in summaries) != 1:
        return False
    for idx, s in enumerate(summaries):
        if s.mass == 0:
            if idx in means:
                return False
            continue
        if idx not in means or means[idx] != tuple(Fraction(v) for v in s.vector):
            return False
    return True


def check_tree_moments_exhaustive(cfg: SuiteConfig) -> list[CheckStats]:
    return _tree_properties(exhaustive_trees(cfg), cfg, "exhaustive", with_oracle=True)


def check_tree_moments_random(cfg: SuiteConfig) -> list[CheckStats]:
    trees = random_trees(cfg, "moments", cfg.moment_trials)
    return _tree_properties(trees, cfg, "random", with_oracle=False)


def _is_prefix(a, b) -> bool:
    """True iff tree ``b`` extends ``a`` only by replacing leaves."""
    if isinstance(a, pdt.Leaf):
        return True
    return (isinstance(b, pdt.Node) and a.mask == b.mask
            and _is_prefix(a.pos, b.pos) and _is_prefix(a.neg, b.neg))


def check_refinement(cfg: SuiteConfig, trees=None, name: str = "refinement_random") -> CheckStats:
    st = CheckStats(name)
    if trees is None:
        trees = random_trees(cfg, "refine", cfg.refine_trials)
    for t in trees:
        r = pdt.refine_correlation_free(t)
        d, rd = pdt.depth(t), pdt.depth(r)
        ok = bool(pdt.is_correlation_free(r))
        ok &= np.array_equal(pdt.induced_bits(r), pdt.induced_bits(t))
        ok &= rd <= 2 * d and _is_prefix(t.root, r.root)
        st.record(ok, 2 * d - rd, rd == 2 * d, lambda: _payload(t=t, refined=pdt.serialize_tree(r)))
    return st


def check_split_increase(cfg: SuiteConfig) -> CheckStats:
    """One-leaf splits raise the second moment by exactly mass * delta^2."""
    st = CheckStats("split_increase")
    rng = cfg.rng("split")
    for _ in range(cfg.split_trials):
        n, d, seed = _random_shape(cfg, rng)
        t = oracle.random_pdt(n, d, seed)
        before = {s.leaf_id: s for s in pdt.leaf_summaries(t)}
        ids = sorted(before)
        leaf_id = ids[rng.below(len(ids))]
        mask = 1 + rng.below((1 << n) - 1)
        split = pdt.split_leaf(t, leaf_id, mask)
        after = {s.leaf_id: s for s in pdt.leaf_summaries(split)}
        v = before[leaf_id]
        u, w = after[leaf_id + "+"], after[leaf_id + "-"]
        # a dead child has an empty forced map, so a redundant query gives delta = 0
        newly = sorted(u.summary.forced.keys() - v.summary.forced.keys())
        delta = sum(u.vector[i] for i in newly)
        increase = pdt.second_moment(split) - pdt.second_moment(t)
        ok = increase == v.mass * delta * delta and increase >= 0
        if u.mass and w.mass:
            ok &= sum(w.vector[i] for i in newly) == -delta
        ok &= np.array_equal(pdt.induced_bits(split), pdt.induced_bits(t))
        st.record(ok, increase, increase == 0,
                  lambda: _payload(t=t, leaf=leaf_id, mask=gf2.indices_from_mask(mask), increase=increase))
    return st


# ------------------------------------------------------ induced-pair checks


def _inequality_suite(pairs, cfg: SuiteConfig, suffix: str) -> list[CheckStats]:
    names = ["theorem1", "theorem4", "lemma3", "entropy_upper", "entropy_dpi", "entropy_lower",
             "entropy_oracle"]
    stats = {k: CheckStats(f"{k}_{suffix}") for k in names}
    for t in pairs:
        f = pdt.induced_function(t)
        for check in (bounds.theorem1_check, bounds.theorem4_check, bounds.lemma3_check):
            rep = check(f, t)
            stats[rep.name].record(rep.holds, rep.slack, rep.equality, lambda: _payload(f, t))
        if boolfn.variance(f) == 0:
            continue
        chain = bounds.entropy_chain(f, t)
        for link in chain.links:
            stats[link.name].record(link.holds, link.slack, False, lambda: _payload(f, t))
        dev = max(abs(chain.h_given_f - oracle.conditional_entropy_given_f(f)),
                  abs(chain.h_given_leaf - oracle.conditional_entropy_given_leaf(t)))
        stats["entropy_oracle"].record(dev <= cfg.tolerance, cfg.tolerance - dev, False,
                                       lambda: _payload(f, t, deviation=dev))
    return list(stats.values())


def check_inequalities_exhaustive(cfg: SuiteConfig) -> list[CheckStats]:
    return _inequality_suite(exhaustive_trees(cfg), cfg, "exhaustive")


def check_inequalities_random(cfg: SuiteConfig) -> list[CheckStats]:
    return _inequality_suite(random_trees(cfg, "entropy", cfg.entropy_trials), cfg, "random")


# ----------------------------------------------------------------- solver


def check_solver(cfg: SuiteConfig) -> CheckStats:
    st = CheckStats("solver_consistency")
    for n in range(1, min(cfg.max_n_exhaustive, oracle.SOLVER_MAX_N) + 1):
        for f in oracle.enumerate_functions(n):
            d, cert = oracle.min_pdt_depth(f)
            plain_d, plain_cert = oracle.min_dt_depth(f)
            ok = bool(pdt.computes(cert, f)) and pdt.depth(cert) == d
            ok &= bool(pdt.computes(plain_cert, f)) and pdt.is_plain(plain_cert)
            ok &= d <= plain_d
            lb = bounds.depth_lower_bound(f) if boolfn.variance(f) else 0
            ok &= lb <= d
            st.record(ok, d - lb, lb == d, lambda: _payload(f, cert))
    maj_d, maj_cert = oracle.min_pdt_depth(boolfn.maj3())
    ok = maj_d == 2 and not pdt.is_plain(maj_cert) and oracle.min_dt_depth(boolfn.maj3())[0] == 3
    ok &= oracle.min_pdt_depth(boolfn.parity(4))[0] == 1
    st.record(ok, payload=lambda: _payload(boolfn.maj3(), maj_cert))
    return st


# -------------------------------------------------- binary entropy bounds


def check_binary_entropy_bounds(cfg: SuiteConfig, tol: float = 1e-12) -> CheckStats:
    """1 - t^2 <= h(1/2 + t/2) <= 1 - t^2/(2 ln 2) on a uniform grid of [-1, 1]."""
    st = CheckStats("binary_entropy_bounds")
    t = np.linspace(-1.0, 1.0, cfg.grid_points)
    p = 0.5 + t / 2
    q = 1 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log2(p), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    lower = 1 - t * t
    upper = 1 - t * t / (2 * math.log(2))
    lo_slack = h - lower
    hi_slack = upper - h
    bad = np.flatnonzero((lo_slack < -tol) | (hi_slack < -tol))
    st.passed += t.size - bad.size
    for k in bad[:MAX_COUNTEREXAMPLES]:
        st.record(False, payload={"t": repr(float(t[k]))})
    st.failed += max(0, bad.size - MAX_COUNTEREXAMPLES)
    st.worst_slack = float(min(lo_slack.min(), hi_slack.min()))
    return st


# ------------------------------------------------------------------ fixtures


def check_fixtures(cfg: SuiteConfig) -> CheckStats:
    """Named instances: the depth-2 MAJ3 tree against the configured second-moment bound."""
    st = CheckStats("fixtures")
    t = pdt.maj3_tree()
    rep = bounds.lemma1_check(t, cfg.moment_factor)
    st.record(rep.holds, rep.slack, rep.equality, lambda: _payload(t=t, second_moment=rep.lhs))
    return st


def run_suite(cfg: SuiteConfig = SuiteConfig()) -> SuiteReport:
    report = SuiteReport()
    report.add(check_fixtures(cfg))
    report.add(check_gf2_systems(cfg))
    report.add(check_fourier(cfg), check_parseval(cfg), check_recmaj(cfg), check_composition_identity(cfg))
    report.add(*check_tree_moments_exhaustive(cfg))
    report.add(*check_tree_moments_random(cfg))
    report.add(check_refinement(cfg, exhaustive_trees(cfg), "refinement_exhaustive"))
    report.add(check_refinement(cfg))
    report.add(check_split_increase(cfg))
    report.add(*check_inequalities_exhaustive(cfg))
    report.add(*check_inequalities_random(cfg))
    report.add(check_solver(cfg))
    report.add(check_binary_entropy_bounds(cfg))
    return report
