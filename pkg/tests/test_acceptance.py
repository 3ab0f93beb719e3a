"""Acceptance criteria at full size.

Each test prints one PASS/FAIL line (also collected in the terminal summary).
Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import time
from fractions import Fraction

import mpmath

from pdtfourier import boolfn, bounds, oracle, pdt
from pdtfourier.suite import (SuiteConfig, check_composition_identity, check_binary_entropy_bounds, check_fourier,
                              check_inequalities_exhaustive, check_inequalities_random, check_refinement,
                              check_split_increase, check_solver, check_tree_moments_exhaustive,
                              check_tree_moments_random)

CFG = SuiteConfig()


def summary(stats):
    return "; ".join(f"{s.name}: {s.passed} ok, {s.failed} failed" for s in stats)


def all_ok(stats):
    return all(s.ok for s in stats)


def test_01_maj3_spectrum(verdict):
    f = boolfn.maj3()
    expected = {1: Fraction(1, 2), 2: Fraction(1, 2), 4: Fraction(1, 2), 7: Fraction(-1, 2)}
    best = float("inf")
    for _ in range(50):
        t0 = time.perf_counter()
        spec = boolfn.spectrum(f)
        best = min(best, time.perf_counter() - t0)
    exact = all(spec.fhat(m) == expected.get(m, 0) for m in range(8))
    ok = exact and best < 1e-3
    assert verdict(1, "MAJ3 spectrum exact", ok, f"{best * 1e6:.0f} us")


def test_02_recursive_majority_linear_sums(verdict):
    t0 = time.perf_counter()
    streamed = [sum(boolfn.linear_coefficients(boolfn.recursive_majority(k)), Fraction(0))
                for k in (1, 2, 3)]
    elapsed = time.perf_counter() - t0
    recursion = [bounds.recmaj_linear_sum(k) for k in (1, 2, 3)]
    ok = streamed == recursion == [Fraction(3, 2), Fraction(9, 4), Fraction(27, 8)] and elapsed < 60
    assert verdict(2, "recursive majority level-1 sums 3/2, 9/4, 27/8", ok,
                   f"{', '.join(map(str, streamed))}; {elapsed:.1f} s")


def test_03_depth_bound_instances(verdict):
    got = [bounds.depth_lower_bound(boolfn.recursive_majority(k)) for k in (1, 2, 3)]
    with mpmath.workdps(50):
        formula = [int(mpmath.ceil((mpmath.mpf(9) / 4) ** k / (4 * mpmath.log(2)))) for k in (1, 2, 3)]
    ok = got == formula == [1, 2, 5]
    assert verdict(3, "depth lower bounds 1, 2, 5", ok, str(got))


def test_04_maj3_tree_second_moment(verdict):
    t = pdt.maj3_tree()
    m2 = pdt.second_moment(t)
    d = pdt.depth(t)
    ok = m2 == Fraction(5, 2) and m2 > d and m2 <= 2 * d
    assert verdict(4, "MAJ3 tree second moment 5/2 in (d, 2d]", ok, f"{m2} vs d={d}")


def test_05_tree_moment_suites(verdict):
    t0 = time.perf_counter()
    stats = check_tree_moments_exhaustive(CFG) + check_tree_moments_random(CFG)
    elapsed = time.perf_counter() - t0
    random_count = next(s for s in stats if s.name == "second_moment_random").passed
    ok = all_ok(stats) and random_count == CFG.moment_trials
    assert verdict(5, "second-moment bounds (2d, d if correlation-free, 2 x average depth)", ok,
                   f"{summary(stats)}; {elapsed:.0f} s"), [s.counterexamples for s in stats]


def test_06_refinement(verdict):
    st = check_refinement(CFG)
    ok = st.ok and st.passed == CFG.refine_trials
    assert verdict(6, "correlation-free refinement", ok, summary([st])), st.counterexamples


def test_07_split_increase(verdict):
    st = check_split_increase(CFG)
    ok = st.ok and st.passed == CFG.split_trials
    assert verdict(7, "split increase = mass * delta^2", ok, summary([st])), st.counterexamples


def test_08_inequality_suites(verdict):
    stats = check_inequalities_exhaustive(CFG) + check_inequalities_random(CFG)
    ok = all_ok(stats)
    assert verdict(8, "variance, sqrt(2d), first-moment and entropy-chain inequalities", ok,
                   summary(stats)), [s.counterexamples for s in stats]


def test_09_composition_identity(verdict):
    st = check_composition_identity(CFG)
    assert verdict(9, "composed level-1 coefficients = products", st.ok, summary([st])), st.counterexamples


def test_10_fast_vs_brute_fourier(verdict):
    st = check_fourier(CFG)
    ok = st.ok and st.passed == 256 + CFG.fourier_trials
    assert verdict(10, "fast transform = brute force", ok, summary([st])), st.counterexamples


def test_11_solver(verdict):
    st = check_solver(CFG)
    maj = oracle.min_pdt_depth(boolfn.maj3())[0]
    par = oracle.min_pdt_depth(boolfn.parity(4))[0]
    ok = st.ok and maj == 2 and par == 1
    assert verdict(11, "exact solver consistency", ok, f"maj3={maj}, parity4={par}; {summary([st])}")


def test_12_binary_entropy_bounds(verdict):
    st = check_binary_entropy_bounds(CFG, tol=1e-12)
    ok = st.ok and st.passed == CFG.grid_points
    assert verdict(12, "binary entropy two-sided bound", ok, summary([st])), st.counterexamples
