"""Counting, ranking and unranking of binary trees with bounded left height."""
from __future__ import annotations

import math
from functools import lru_cache


@lru_cache(maxsize=None)
def _row(k: int, upto: int) -> tuple[int, ...]:
    # T_k(0..upto); T_{-1}(s) = [s == 0]
    if k < 0:
        return tuple(1 if s == 0 else 0 for s in range(upto + 1))
    left = _row(k - 1, upto)
    t = [1]
    for s in range(1, upto + 1):
        t.append(sum(left[i] * t[s - 1 - i] for i in range(s)))
    return tuple(t)


def count_trees(n: int, k: int) -> int:
    """Number of binary trees on ``n`` nodes whose left height is at most ``k``."""
    if n < 0 or k < 0:
        raise ValueError("count_trees needs n >= 0 and k >= 0")
    k = min(k, max(n - 1, 0))
    return _row(k, n)[n]


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _offsets(k: int, s: int) -> tuple[int, ...]:
    # offsets[a] = number of trees of size s (left height <= k) whose left subtree is smaller than a
    left, right = _row(k - 1, s), _row(k, s)
    out, acc = [], 0
    for a in range(s):
        out.append(acc)
        acc += left[a] * right[s - 1 - a]
    out.append(acc)
    return tuple(out)


def rank_tree(left: list[int], right: list[int], root: int, size: int, k: int) -> int:
    """Rank of a tree among all size-``size`` trees with left height <= k.

    Nodes are in-order indices 0..size-1; ``left``/``right`` hold child indices or -1.
    Trees are ordered by left-subtree size, then left rank, then right rank.
    """

    def go(lo: int, hi: int, r: int, kk: int) -> int:
        s = hi - lo
        if s <= 1:
            return 0
        a = r - lo
        rl = go(lo, r, left[r], kk - 1) if a else 0
        rr = go(r + 1, hi, right[r], kk) if r + 1 < hi else 0
        return _offsets(kk, s)[a] + rl * _row(kk, s)[s - 1 - a] + rr

    return go(0, size, root, k)


@lru_cache(maxsize=1 << 16)
def unrank_tree(size: int, k: int, idx: int) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Inverse of :func:`rank_tree`; returns (left, right, root)."""
    left = [-1] * size
    right = [-1] * size

    def go(lo: int, s: int, kk: int, i: int) -> int:
        if s == 0:
            return -1
        offs = _offsets(kk, s)
        a = 0
        while offs[a + 1] <= i:
            a += 1
        i -= offs[a]
        nright = _row(kk, s)[s - 1 - a]
        rl, rr = divmod(i, nright)
        r = lo + a
        left[r] = go(lo, a, kk - 1, rl)
        right[r] = go(r + 1, s - 1 - a, kk, rr)
        return r

    if not 0 <= idx < _row(k, size)[size]:
        raise ValueError(f"tree index {idx} out of range")
    root = go(0, size, k, idx)
    return tuple(left), tuple(right), root


def rank_subset(elems: list[int]) -> int:
    """Colex rank of a sorted subset of {0, 1, ...}."""
    return sum(math.comb(c, i + 1) for i, c in enumerate(elems))


@lru_cache(maxsize=1 << 14)
def unrank_subset(size: int, idx: int) -> tuple[int, ...]:
    out = []
    for i in range(size, 0, -1):
        c = i - 1
        while math.comb(c + 1, i) <= idx:
            c += 1
        idx -= math.comb(c, i)
        out.append(c)
    return tuple(reversed(out))
