import itertools
import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brmq.codec import deserialize, serialize
from brmq.core import COL_MAJOR, ROW_MAJOR, Array2D, IndexOutOfRange, Pos2D, RangeInverted, Rect, UnsupportedPolicy
from brmq.rmq2d import (
    ColSpan2D,
    FourSidedBlocked,
    InvalidStaircase,
    MinTreeIndex,
    OneSided2D,
    Staircase,
    ThreeSidedCk,
    TwoSidedGeneral,
    TwoSidedStaircase,
    answers_dp,
    ck_array,
    colspan_build,
    colspan_query,
    foursided_build,
    foursided_query,
    onesided2d_build,
    onesided2d_query,
    path_bits,
    staircases,
    threesided_build,
    threesided_query,
    twosided_general_build,
    twosided_general_query,
    twosided_staircase_build,
    twosided_staircase_query,
)
from naive import all_grids, ck_literal, scan_rmq, scan_rmq2d

A = [[1, 0], [0, 0]]


def bits_of(v):
    return "".join(str(v.rank1(i) - v.rank1(i - 1)) for i in range(1, v.length + 1))


def reload(s):
    return deserialize(serialize(s)[0])


# -- examples ---------------------------------------------------------------


def test_answers_dp_examples():
    assert answers_dp(A, ROW_MAJOR) == [[(1, 1), (1, 2)], [(2, 1), (1, 2)]]
    assert answers_dp([[5]]) == [[(1, 1)]]
    assert answers_dp(A, COL_MAJOR)[1][1] == (2, 1)


def test_onesided2d_examples():
    s = onesided2d_build([[2, 1], [3, 2]])
    assert onesided2d_query(s, 2) == (1, 2)
    assert onesided2d_query(s, 1) == (1, 1)
    assert onesided2d_query(onesided2d_build([[0]]), 1) == (1, 1)


def test_twosided_general_examples():
    s = twosided_general_build(A)
    assert twosided_general_query(s, 2, 2) == (2, 1)
    assert twosided_general_query(s, 1, 2) == (1, 2)
    assert twosided_general_query(twosided_general_build([[0, 1], [1, 1]]), 1, 1) == (1, 1)
    with pytest.raises(UnsupportedPolicy):
        twosided_general_build(A, ROW_MAJOR)


def test_staircase_levels():
    # cumulative levels keep the dominance-minimal answers with value <= level
    levels = staircases(A, ROW_MAJOR)
    assert set(levels[0].points) == {(2, 1), (1, 2)}
    assert set(levels[1].points) == {(1, 1)}
    const = staircases(Array2D([[1, 1], [1, 1]], 2))
    assert [set(s.points) for s in const] == [set(), {(1, 1)}]
    assert [s.points for s in staircases(Array2D([[0]], 3))] == [((1, 1),)] * 3


def test_path_bits_examples():
    assert bits_of(path_bits(Staircase(0, (Pos2D(1, 1),)), 1, 1)) == "1010"
    assert bits_of(path_bits(Staircase(0, ()), 1, 1)) == "1100"
    assert bits_of(path_bits(Staircase(0, (Pos2D(1, 1),)), 1, 2)) == "10110"
    with pytest.raises(InvalidStaircase):
        path_bits(Staircase(0, (Pos2D(1, 1), Pos2D(1, 2))), 2, 2)
    with pytest.raises(InvalidStaircase):
        path_bits(Staircase(0, (Pos2D(3, 1),)), 2, 2)


def test_twosided_staircase_examples():
    s = twosided_staircase_build(A, ROW_MAJOR)
    assert twosided_staircase_query(s, 2, 2) == (1, 2)
    assert twosided_staircase_query(s, 1, 1) == (1, 1)
    assert twosided_staircase_query(twosided_staircase_build(A, COL_MAJOR), 2, 2) == (2, 1)


def test_ck_examples():
    b = [[1, 0], [0, 1]]
    assert ck_array(b, 0) == [2, 1]
    assert ck_array(b, 1) == [1, 0]
    assert ck_array([[1], [2]], 0) == [3]


def test_threesided_examples():
    s = threesided_build([[1, 0], [0, 1]])
    assert threesided_query(s, 2, 1, 2) == (1, 2)
    assert threesided_query(s, 1, 2, 2) == (1, 2)
    assert threesided_query(threesided_build([[2, 3], [1, 0], [1, 0]]), 3, 1, 1) == (2, 1)
    with pytest.raises(UnsupportedPolicy):
        threesided_build(A, COL_MAJOR)
    with pytest.raises(RangeInverted):
        s.query(1, 2, 1)


def test_colspan_examples():
    s = colspan_build([[2, 1], [0, 3]])
    assert s.minima.query(1, 2) == 1 and [s.rows.get(j) + 1 for j in (1, 2)] == [2, 1]
    assert colspan_query(s, 1, 2) == (2, 1)
    assert colspan_query(s, 2, 2) == (1, 2)
    assert colspan_query(colspan_build([[3], [1], [1]]), 1, 1) == (2, 1)
    with pytest.raises(UnsupportedPolicy):
        colspan_build(A, ROW_MAJOR)


def test_foursided_examples():
    for p in (ROW_MAJOR, COL_MAJOR):
        s = foursided_build([[0, 1], [1, 0]], p, c=2)
        assert foursided_query(s, Rect(1, 2, 1, 2)) == (1, 1)
        t = foursided_build([[1, 1, 0, 1], [1, 1, 1, 1]], p, c=2)
        assert foursided_query(t, Rect(1, 2, 2, 3)) == (1, 3)
        for r, c in itertools.product((1, 2), (1, 2, 3, 4)):
            assert t.query(r, r, c, c) == (r, c)


def test_query_bounds():
    for s in (OneSided2D(A), TwoSidedStaircase(A), TwoSidedGeneral(A)):
        with pytest.raises(IndexOutOfRange):
            s.query_rect(Rect(1, 2, 1, 3))
    with pytest.raises(IndexOutOfRange):
        FourSidedBlocked(A).query(1, 3, 1, 1)
    with pytest.raises(RangeInverted):
        FourSidedBlocked(A).query(2, 1, 1, 1)


# -- staircase structure --------------------------------------------------


def small_arrays():
    for m, n, sigma in [(1, 4, 3), (2, 2, 3), (2, 3, 2), (3, 2, 3), (3, 3, 2)]:
        for g in all_grids(m, n, sigma):
            yield Array2D(g, sigma)


@pytest.mark.parametrize("policy", [ROW_MAJOR, COL_MAJOR])
def test_staircase_properties(policy):
    for a in small_arrays():
        m, n = a.m, a.n
        grid = answers_dp(a, policy)
        answers = {p for row in grid for p in row}
        levels = staircases(a, policy)
        s = TwoSidedStaircase(a, policy)
        for st_ in levels:
            pts = st_.points
            # increasing columns, strictly decreasing rows: an antichain
            assert all(p[1] < q[1] and p[0] > q[0] for p, q in zip(pts, pts[1:]))
            assert set(pts) <= answers
            for p in pts:
                v = a.at(*p)
                assert v <= st_.level
                # nothing smaller than p's value in p's own 2-sided region
                assert all(a.at(r, c) >= v for r in range(1, p[0] + 1) for c in range(1, p[1] + 1))
        for b in s.paths:
            assert b.length == m + n + 2 and b.rank0(b.length) == m + 1
        for i, j in itertools.product(range(1, m + 1), range(1, n + 1)):
            covered = [s._covers(k, i, j) for k in range(a.sigma)]
            assert covered == sorted(covered)
            assert covered[-1]


def test_staircase_counter_bound():
    rng = random.Random(1)
    for sigma in (2, 3, 5, 16, 64):
        a = Array2D([[rng.randrange(sigma) for _ in range(20)] for _ in range(9)], sigma)
        s = TwoSidedStaircase(a)
        for i, j in itertools.product(range(1, 10), range(1, 21)):
            s.query(i, j)
            assert s.level_tests <= math.ceil(math.log2(sigma)) + 1


# -- C_k ---------------------------------------------------------------------


def test_ck_matches_definition():
    for m, n, sigma in [(3, 2, 3), (4, 1, 4), (2, 3, 3)]:
        for g in all_grids(m, n, sigma):
            for k in range(sigma):
                assert ck_array(Array2D(g, sigma), k) == ck_literal(g, k)


def test_threesided_counter_bound():
    rng = random.Random(2)
    for sigma in (2, 3, 5, 16, 64):
        a = Array2D([[rng.randrange(sigma) for _ in range(15)] for _ in range(7)], sigma)
        s = ThreeSidedCk(a)
        for i in range(1, 8):
            for j1 in range(1, 16):
                for j2 in range(j1, 16, 3):
                    got = s.query(i, j1, j2)
                    assert s.presence_tests <= math.ceil(math.log2(sigma)) + 1
                    assert got == scan_rmq2d(a.tolist(), 1, i, j1, j2)


# -- 4-sided decomposition ----------------------------------------------------


def covered_cells(s, frags):
    c = s.c
    out = Counter()
    for f in frags:
        kind = f[0]
        if kind == "block":
            _, r1, r2, c1, c2 = f
            assert r1 // c == r2 // c and c1 // c == c2 // c
            out.update(itertools.product(range(r1, r2 + 1), range(c1, c2 + 1)))
        elif kind == "rows":
            _, r, b1, b2 = f
            out.update((r, q) for q in range(b1 * c, min(b2 * c + c, s.n)))
        elif kind == "cols":
            _, q, b1, b2 = f
            out.update((r, q) for r in range(b1 * c, min(b2 * c + c, s.m)))
        else:
            _, a1, a2, b1, b2 = f
            out.update(itertools.product(range(a1 * c, min(a2 * c + c, s.m)), range(b1 * c, min(b2 * c + c, s.n))))
    return out


@pytest.mark.parametrize("m,n,c", [(5, 7, 2), (9, 9, 3), (10, 4, 3), (1, 11, 2), (8, 8, 1)])
def test_fragments_cover_rect_exactly_once(m, n, c):
    s = FourSidedBlocked(Array2D(np.zeros((m, n), dtype=int), 2), c=c)
    for r1, r2 in itertools.combinations_with_replacement(range(1, m + 1), 2):
        for c1, c2 in itertools.combinations_with_replacement(range(1, n + 1), 2):
            frags = s.decompose(r1, r2, c1, c2)
            want = Counter(itertools.product(range(r1 - 1, r2), range(c1 - 1, c2)))
            assert covered_cells(s, frags) == want
            assert len(frags) <= 4 + 4 * (c - 1) + 1


@pytest.mark.parametrize("policy", [ROW_MAJOR, COL_MAJOR])
def test_foursided_random(policy):
    rng = random.Random(3)
    for _ in range(25):
        m, n, sigma = rng.randint(1, 14), rng.randint(1, 14), rng.choice([2, 3, 5, 16])
        g = [[rng.randrange(sigma) for _ in range(n)] for _ in range(m)]
        a = Array2D(g, sigma)
        s = FourSidedBlocked(a, policy, c=rng.randint(1, 4))
        t = reload(s)
        assert t.cells() == g
        for _ in range(150):
            r1, r2 = sorted((rng.randint(1, m), rng.randint(1, m)))
            c1, c2 = sorted((rng.randint(1, n), rng.randint(1, n)))
            want = scan_rmq2d(g, r1, r2, c1, c2, col_major=policy is COL_MAJOR)
            assert s.query(r1, r2, c1, c2) == t.query(r1, r2, c1, c2) == want
            assert s.fragments <= 4 + 4 * (s.c - 1) + 1


def test_row_strip_values_are_block_row_minima():
    rng = random.Random(6)
    g = [[rng.randrange(4) for _ in range(10)] for _ in range(7)]
    s = FourSidedBlocked(Array2D(g, 4), c=3)
    for i in range(7):
        for bj in range(s.nb):
            seg = g[i][bj * 3 : min(bj * 3 + 3, 10)]
            assert s.row_strips._vals[i * s.nb + bj] == min(seg)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=90), st.integers(1, 20))
def test_min_tree_index(vals, group):
    t = MinTreeIndex(vals, 7, group)
    n = len(vals)
    for i in range(1, n + 1):
        for j in range(i, n + 1, max(1, n // 10)):
            assert t.query(i, j) == scan_rmq(vals, i, j)


# -- differential against the naive scan ------------------------------------


STRUCTS = [
    (OneSided2D, (ROW_MAJOR, COL_MAJOR), lambda m, n: [(1, m, 1, j) for j in range(1, n + 1)]),
    (TwoSidedStaircase, (ROW_MAJOR, COL_MAJOR), lambda m, n: [(1, i, 1, j) for i in range(1, m + 1) for j in range(1, n + 1)]),
    (TwoSidedGeneral, (COL_MAJOR,), lambda m, n: [(1, i, 1, j) for i in range(1, m + 1) for j in range(1, n + 1)]),
    (ThreeSidedCk, (ROW_MAJOR,), lambda m, n: [(1, i, a, b) for i in range(1, m + 1) for a in range(1, n + 1) for b in range(a, n + 1)]),
    (ColSpan2D, (COL_MAJOR,), lambda m, n: [(1, m, a, b) for a in range(1, n + 1) for b in range(a, n + 1)]),
]


@pytest.mark.parametrize("cls,policies,rects", STRUCTS, ids=lambda x: getattr(x, "NAME", ""))
def test_exhaustive_against_scan(cls, policies, rects):
    for a in small_arrays():
        g = a.tolist()
        for p in policies:
            s = cls(a, p)
            for r1, r2, c1, c2 in rects(a.m, a.n):
                want = scan_rmq2d(g, r1, r2, c1, c2, col_major=p is COL_MAJOR)
                assert s.query_rect(Rect(r1, r2, c1, c2, cls.QCLASS)) == want, (g, p, r1, r2, c1, c2)


def test_onesided2d_payload_shape():
    rng = random.Random(8)
    for sigma in (2, 3, 16):
        a = Array2D([[rng.randrange(sigma) for _ in range(40)] for _ in range(6)], sigma)
        for p in (ROW_MAJOR, COL_MAJOR):
            s = OneSided2D(a, p)
            ones = s.B.rank1(s.n)
            assert 1 <= ones <= min(sigma, s.n) and s.B.rank1(1) == 1
            assert len(s._rows) == ones
