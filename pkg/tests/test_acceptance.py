"""Acceptance criteria, one test each, at their stated tolerances.

Each test records a single PASS/FAIL line; pytest prints them all in an
"acceptance criteria" section at the end of the run.
"""
import itertools
import math
import random
import statistics
import time

import numpy as np
import pytest

from brmq.bitseq import default_chunk
from brmq.codec import deserialize, serialize
from brmq.core import Array2D, bits_for
from brmq.encodings import ENCODINGS, answer
from brmq.hardness import (
    FAMILY_POLICY,
    QUERY_CLASS,
    FamilyParams,
    Kind,
    count_distinct_cartesian,
    enumerate_family,
    gen_family,
    r_const,
    reconstruct_binary,
    sample_family,
)
from brmq.oracle import distinct_tables, oracle_rmq, queries_of
from brmq.rmq1d import BinaryRmq, OneSided1D, Rmq1DBounded, Rmq1DGeneral
from brmq.rmq2d import ColSpan2D, FourSidedBlocked, OneSided2D, ThreeSidedCk, TwoSidedGeneral, TwoSidedStaircase
from brmq.spacemeter import measure
from brmq.suite import CheckResult, all_arrays, check_exhaustive, check_random, random_array, random_rect
from brmq.treecount import catalan, count_trees

EXHAUSTIVE_SHAPES = [(1, 6, 2), (1, 4, 3), (2, 2, 2), (2, 3, 2), (3, 3, 2), (2, 2, 3)]
SIGMAS = [2, 3, 5, 16, 64]


def test_c01_exhaustive_differential(criterion):
    t0 = time.perf_counter()
    total = CheckResult("all", "each")
    runs = 0
    for info in ENCODINGS.values():
        for pol in info.policies:
            for m, n, sigma in EXHAUSTIVE_SHAPES:
                res = check_exhaustive(info, pol, m, n, sigma)
                runs += res.arrays > 0
                total.merge(res)
    secs = time.perf_counter() - t0
    ok = total.mismatches == 0 and runs > 0 and secs < 300
    criterion(1, ok, f"{runs} (encoding, policy, shape) suites, arrays={total.arrays} "
                     f"queries={total.queries} mismatches={total.mismatches} in {secs:.0f}s")


@pytest.mark.slow
def test_c02_random_differential(criterion):
    rng = random.Random(20240601)
    total = CheckResult("2d", "each")
    pairs = 0
    two_d = [info for info in ENCODINGS.values() if not info.one_dim]
    for k in range(200):
        sigma = SIGMAS[k % len(SIGMAS)]
        a = random_array(rng, rng.randint(1, 32), rng.randint(1, 64), sigma)
        for info in two_d:
            for pol in info.policies:
                total.merge(check_random(info, pol, a, 1000, rng))
                pairs += 1
    one = CheckResult("1d", "row_major")
    one_d = [info for info in ENCODINGS.values() if info.one_dim]
    for k in range(40):
        n = rng.randint(1, 4096) if k % 4 else 4096
        for info in one_d:
            sigma = 2 if info.max_sigma == 2 else SIGMAS[k % len(SIGMAS)]
            a = random_array(rng, 1, n, sigma)
            one.merge(check_random(info, info.native, a, 1000, rng))
    ok = total.mismatches == 0 and one.mismatches == 0 and total.queries >= 1000 * pairs
    criterion(2, ok, f"2D: 200 arrays, {pairs} (array, encoding, policy) runs, queries={total.queries} "
                     f"mismatches={total.mismatches}; 1D n<=4096: arrays={one.arrays} queries={one.queries} "
                     f"mismatches={one.mismatches}")


def test_c03_self_containment(criterion):
    checked = bad = 0
    for info in ENCODINGS.values():
        for pol in info.policies:
            for m, n, sigma in EXHAUSTIVE_SHAPES:
                for idx, a in enumerate(all_arrays(m, n, sigma)):
                    if idx % 5 or not info.applicable(a):
                        continue
                    live = info.build(a, pol)
                    rects = list(queries_of(info.qclass, m, n))
                    before = [answer(live, r) for r in rects]
                    want = [oracle_rmq(a, r, pol) for r in rects]
                    blob = serialize(live)[0]
                    del live, a
                    back = deserialize(blob)
                    after = [answer(back, r) for r in rects]
                    checked += len(rects)
                    bad += sum(x != y or x != w for x, y, w in zip(before, after, want))
    criterion(3, bad == 0 and checked > 0, f"reloaded answers checked={checked} differing={bad}")


def test_c04_counting(criterion):
    fails = []
    if count_trees(3, 1) != 4:
        fails.append("count_trees(3,1)")
    for n in range(1, 11):
        if count_trees(n, 1) != count_distinct_cartesian(n, 2):
            fails.append(f"sigma=2 n={n}")
        if count_distinct_cartesian(n, 3) != count_trees(n, 2):
            fails.append(f"sigma=3 n={n}")
    for n in range(1, 8):
        if count_distinct_cartesian(n, 4) != count_trees(n, 3):
            fails.append(f"sigma=4 n={n}")
    for n in range(0, 21):
        for k in range(max(n - 1, 0), n + 2):
            if count_trees(n, k) != catalan(n):
                fails.append(f"catalan n={n} k={k}")
    criterion(4, not fails, "all exact counts agree" if not fails else f"failed: {fails}")


def test_c05_growth_constants(criterion):
    parts, ok = [], True
    for k in (1, 2, 3):
        ratio = count_trees(60, k) / count_trees(59, k)
        r = r_const(k)
        ok &= abs(ratio - r) <= 0.02 * r
        parts.append(f"k={k} ratio={ratio:.4f} r={r:.6f}")
    ok &= r_const(1) == pytest.approx(2.0, abs=1e-12)
    ok &= abs(math.log2(r_const(2)) - 1.388) <= 0.001
    ok &= r_const(3) == pytest.approx(3.0, abs=1e-12)
    criterion(5, ok, "; ".join(parts) + f"; log2 r(2)={math.log2(r_const(2)):.4f}")


def _family_count(kind, m, n, sigma=2, sample=0):
    p = FamilyParams(kind, m, n, sigma)
    members = sample_family(p, sample, seed=1) if sample else list(enumerate_family(p))
    arrays = (gen_family(x) for x in members)
    return len(members), distinct_tables(arrays, QUERY_CLASS[kind], FAMILY_POLICY[kind], max_cells=None)


@pytest.mark.slow
def test_c06_family_distinguishability(criterion):
    t0 = time.perf_counter()
    exact = {
        (Kind.ONE_SIDED_GEN, 3, 3, 2): 27,
        (Kind.TWO_SIDED_ROWS, 2, 3, 2): 16,
        (Kind.ONE_SIDED_BOUNDED, 2, 4, 3): 2 ** 2 * math.comb(4, 2),
        (Kind.COLSPAN_BINARY, 3, 3, 2): 3 ** 3,
    }
    parts, ok = [], True
    for (kind, m, n, s), want in exact.items():
        members, got = _family_count(kind, m, n, s)
        ok &= members == got == want
        parts.append(f"{kind.value}={got}/{want}")
    for kind, m, n, s in [(Kind.THREE_SIDED_COLS, 5, 4, 3), (Kind.TWO_SIDED_PARALLELOGRAM, 3, 29, 3),
                          (Kind.FOUR_SIDED_BLOCKS, 4, 24, 16)]:
        members, got = _family_count(kind, m, n, s, sample=500)
        ok &= members >= 500 and got == members
        parts.append(f"{kind.value}={got}/{members} sampled")
    secs = time.perf_counter() - t0
    ok &= secs < 600
    criterion(6, ok, ", ".join(parts) + f" in {secs:.0f}s")


@pytest.mark.slow
def test_c07_space_1d(criterion):
    n = 1 << 20
    rng = np.random.default_rng(7)
    bin_vals = rng.integers(0, 2, n)
    parts, ok = [], True

    binary = measure(BinaryRmq(bin_vals)).total_bits
    ok &= binary <= 1.3 * n
    parts.append(f"binary={binary / n:.3f}n")

    bounded = measure(Rmq1DBounded(bin_vals, 2, b=16))
    types = bounded.bits("types")
    ok &= types == (n // 16) * 15 and bounded.total_bits <= 1.5 * n
    parts.append(f"bounded types={types} ({types / n:.4f}/elt) total={bounded.total_bits / n:.3f}n")

    general2 = measure(Rmq1DGeneral(bin_vals)).total_bits
    ok &= general2 <= 4.5 * n and bounded.total_bits < general2
    parts.append(f"general={general2 / n:.3f}n")

    tri = rng.integers(0, 3, n)
    b3 = measure(Rmq1DBounded(tri, 3)).total_bits
    g3 = measure(Rmq1DGeneral(tri)).total_bits
    ok &= b3 < g3 <= 4.5 * n
    parts.append(f"sigma=3 bounded={b3 / n:.3f}n general={g3 / n:.3f}n")
    criterion(7, ok, "; ".join(parts))


def _paths_payload(rep, sigma):
    return sum(rep.bits(f"paths/{k}/bits") for k in range(sigma))


@pytest.mark.slow
def test_c08_space_2d(criterion):
    rng = np.random.default_rng(8)
    parts, ok = [], True

    stair_ok = True
    for m, n, sigma in [(1, 1, 1), (3, 5, 2), (32, 64, 5), (17, 40, 64)]:
        a = Array2D(rng.integers(0, sigma, (m, n)), sigma)
        for pol in TwoSidedStaircase.POLICIES:
            rep = measure(TwoSidedStaircase(a, pol))
            stair_ok &= _paths_payload(rep, sigma) == sigma * (m + n + 2)
    ok &= stair_ok
    parts.append(f"staircase paths exact={stair_ok}")

    one_ok = True
    for m, n, sigma in [(1, 10, 2), (7, 300, 3), (32, 64, 16), (64, 2000, 64)]:
        a = Array2D(rng.integers(0, sigma, (m, n)), sigma)
        for pol in OneSided2D.POLICIES:
            s = OneSided2D(a, pol)
            changes = s.B.rank1(n)
            rep = measure(s)
            one_ok &= rep.bits("rows") == changes * bits_for(m) and changes <= min(sigma, n)
    ok &= one_ok
    parts.append(f"onesided2d rows exact={one_ok}")

    m, n = 64, 1 << 20
    col = measure(ColSpan2D(Array2D(rng.integers(0, 64, (m, n), dtype=np.uint8), 64)))
    w2 = col.bits("rows")
    w2_bound = n * math.log2(m) + n / default_chunk(m) + 64
    ok &= w2 <= w2_bound
    parts.append(f"colspan W2={w2}<={w2_bound:.0f}")

    m, n, sigma = 32, 4096, 16
    tri = measure(ThreeSidedCk(Array2D(rng.integers(0, sigma, (m, n)), sigma)))
    tri_bound = sigma * n * math.ceil(math.log2(m + 2)) + sigma * 4.5 * n
    ok &= tri.total_bits <= tri_bound
    parts.append(f"threesided={tri.total_bits}<={tri_bound:.0f}")

    m = n = 1024
    sigma, c = 4, 3
    four = measure(FourSidedBlocked(Array2D(rng.integers(0, sigma, (m, n)), sigma), c=c))
    lg = math.ceil(math.log2(sigma))
    blocks, rows, cols = four.bits("blocks"), four.bits("row_strips"), four.bits("col_strips")
    block_bound = m * n * lg + m * n / c**2
    strip_bound = 2 * m * n * lg / c
    ok &= blocks <= block_bound and rows <= strip_bound and cols <= strip_bound
    parts.append(f"foursided blocks={blocks}<={block_bound:.0f} strips={rows},{cols}<={strip_bound:.0f} "
                 f"(core directory {four.bits('core/directory')} reported separately)")
    criterion(8, ok, "; ".join(parts))


def _median_latency(s, qclass, m, n, rng, count=4000):
    rects = [random_rect(rng, qclass, m, n) for _ in range(count)]
    for r in rects[:200]:
        answer(s, r)
    lat = []
    for r in rects:
        t0 = time.perf_counter()
        answer(s, r)
        lat.append(time.perf_counter() - t0)
    return statistics.median(lat)


@pytest.mark.slow
def test_c09_query_cost(criterion):
    rng = random.Random(9)
    worst_ok = True
    notes = []
    for sigma in [1, 2, 3, 5, 16, 64]:
        bound = math.ceil(math.log2(sigma)) + 1
        a = random_array(rng, 16, 48, sigma)
        st, th = TwoSidedStaircase(a), ThreeSidedCk(a)
        worst = 0
        for _ in range(2000):
            i, j = rng.randint(1, 16), rng.randint(1, 48)
            j1 = rng.randint(1, j)
            st.query(i, j)
            th.query(i, j1, j)
            worst = max(worst, st.level_tests, th.presence_tests)
        worst_ok &= worst <= bound
        notes.append(f"s={sigma}:{worst}<={bound}")

    builders = {
        "onesided1d": lambda size, g: OneSided1D(g.integers(0, 16, size)),
        "binary_rmq": lambda size, g: BinaryRmq(g.integers(0, 2, size)),
        "onesided2d": lambda size, g: OneSided2D(Array2D(g.integers(0, 16, (4, size // 4)), 16)),
        "colspan": lambda size, g: ColSpan2D(Array2D(g.integers(0, 16, (4, size // 4)), 16)),
        "twosided_general": lambda size, g: TwoSidedGeneral(Array2D(g.integers(0, 16, (4, size // 4)), 16)),
        "rmq1d_bounded": lambda size, g: Rmq1DBounded(g.integers(0, 4, size), 4),
    }
    lat_ok = True
    for name, build in builders.items():
        med = []
        for size in (1 << 16, 1 << 22):
            s = build(size, np.random.default_rng(size))
            info = ENCODINGS[name]
            m, n = (1, size) if info.one_dim else (4, size // 4)
            med.append(_median_latency(s, info.qclass, m, n, rng))
            del s
        ratio = med[1] / med[0]
        lat_ok &= ratio <= 3.0
        notes.append(f"{name} {med[0] * 1e6:.1f}->{med[1] * 1e6:.1f}us x{ratio:.2f}")
    criterion(9, worst_ok and lat_ok, "level tests " + " ".join(notes[:6]) + "; latency 2^16->2^22: " + ", ".join(notes[6:]))


def test_c10_binary_reconstruction(criterion):
    arrays = 0
    bad = 0
    for n in range(1, 13):
        for head in itertools.product((0, 1), repeat=n - 1):
            a = list(head) + [0]
            arrays += 1
            s = deserialize(serialize(BinaryRmq(a))[0])
            bad += reconstruct_binary(s.query, n) != a
    criterion(10, bad == 0, f"binary arrays n<=12 with A[n]=0: {arrays} reconstructed, {bad} wrong")
