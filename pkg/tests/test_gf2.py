from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdtfourier import gf2
from pdtfourier.gf2 import AffineSystem, BitMatrix


def span(rows):
    """Every XOR combination of ``rows``, by subset enumeration."""
    out = set()
    for k in range(len(rows) + 1):
        for combo in combinations(rows, k):
            v = 0
            for r in combo:
                v ^= r
            out.add(v)
    return out


def solutions(system: AffineSystem):
    n = system.n
    return [x for x in range(1 << n)
            if all(gf2.parity(r & x) == b for r, b in zip(system.matrix.rows, system.rhs))]


def brute_rank(rows):
    return len(span(rows)).bit_length() - 1


def test_rank_identity():
    assert gf2.rank(BitMatrix.from_strings(["100", "010", "001"])) == 3


def test_rank_dependent_rows():
    m = BitMatrix.from_strings(["110", "011", "101"])
    assert gf2.rank(m) == 2 == brute_rank(m.rows)


def test_rank_empty():
    assert gf2.rank(BitMatrix(3, ())) == 0


def test_string_columns_are_coordinates():
    assert BitMatrix.from_strings(["100"]).rows == (1,)
    assert gf2.bits_to_int("001") == 4


def test_in_row_space_examples():
    assert gf2.in_row_space(BitMatrix.from_strings(["110", "001"]), "111")
    assert not gf2.in_row_space(BitMatrix.from_strings(["110"]), "100")
    assert gf2.in_row_space(BitMatrix.from_strings(["110"]), "000")


def test_in_row_space_width_mismatch():
    with pytest.raises(ValueError):
        gf2.in_row_space(BitMatrix.from_strings(["110"]), "1100")


def test_row_overflow_rejected():
    with pytest.raises(ValueError):
        BitMatrix(2, (4,))


def system(n, queries):
    masks = [gf2.mask_from_indices(q, n) for q, _ in queries]
    return AffineSystem(BitMatrix(n, tuple(masks)), tuple(b for _, b in queries))


def test_single_parity_query_correlates_pair():
    s = gf2.analyze_system(system(3, [((1, 2), 0)]))
    assert s.consistent and s.rank == 1
    assert s.forced == {}
    assert s.correlated_pairs == {(0, 1)}


def test_parity_plus_unit_forces_both():
    s = gf2.analyze_system(system(3, [((1, 2), 0), ((1,), 0)]))
    assert s.rank == 2
    assert s.forced == {0: 0, 1: 0}
    assert s.correlated_pairs == frozenset()


def test_contradiction():
    assert not gf2.analyze_system(system(3, [((1,), 0), ((1,), 1)])).consistent


def test_shared_tail_correlation():
    # x1+x3 and x2+x3 fixed: x1+x2 fixed too
    s = gf2.analyze_system(system(3, [((1, 3), 0), ((2, 3), 1)]))
    assert s.correlated_pairs == {(0, 1), (0, 2), (1, 2)}


def test_correlation_classes():
    assert gf2.correlation_classes({(3, 5), (0, 1), (1, 4)}) == [[0, 1, 4], [3, 5]]
    assert gf2.correlation_classes(set()) == []


@st.composite
def systems(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(0, 6))
    rows = tuple(draw(st.integers(0, (1 << n) - 1)) for _ in range(k))
    rhs = tuple(draw(st.integers(0, 1)) for _ in range(k))
    return AffineSystem(BitMatrix(n, rows), rhs)


@settings(max_examples=400, deadline=None)
@given(systems())
def test_summary_matches_enumeration(sys_):
    s = gf2.analyze_system(sys_)
    sols = solutions(sys_)
    assert s.consistent == bool(sols)
    assert s.rank == brute_rank(sys_.matrix.rows)
    if not sols:
        return
    n = sys_.n
    assert len(sols) == 2 ** (n - s.rank)
    forced = {i: (sols[0] >> i) & 1 for i in range(n)
              if len({(x >> i) & 1 for x in sols}) == 1}
    assert s.forced == forced
    pairs = {(i, j) for i in range(n) for j in range(i + 1, n)
             if i not in forced
             and len({((x >> i) ^ (x >> j)) & 1 for x in sols}) == 1}
    assert s.correlated_pairs == pairs


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=8),
                        st.integers(0, (1 << n) - 1), st.randoms(use_true_random=False))))
def test_rank_bounds_and_row_operation_invariance(case):
    n, rows, v, rnd = case
    m = BitMatrix(n, tuple(rows))
    r = gf2.rank(m)
    assert r <= min(len(rows), n)
    assert r == brute_rank(rows)
    assert gf2.in_row_space(m, v) == (v in span(rows))
    if len(rows) >= 2:
        a, b = rnd.sample(range(len(rows)), 2)
        mixed = list(rows)
        mixed[a] ^= mixed[b]
        rnd.shuffle(mixed)
        assert gf2.rank(BitMatrix(n, tuple(mixed))) == r
