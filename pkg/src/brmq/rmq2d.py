"""Two-dimensional RMQ encodings and the constructions behind them.

Every structure answers with a 1-based ``Pos2D`` and exposes ``query_rect``
taking a ``Rect`` of its query class, so test drivers can treat them alike.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .bitseq import BitVec, PackedArray, make_bits
from .codec import Encoded, Field
from .core import (
    COL_MAJOR,
    ROW_MAJOR,
    Candidate,
    IndexOutOfRange,
    Policy,
    Pos2D,
    QueryClass,
    RangeInverted,
    Rect,
    RmqError,
    UnsupportedPolicy,
    as_array,
    bits_for,
    policy_min,
)
from .rmq1d import Rmq1DBounded, Rmq1DGeneral


class InvalidStaircase(RmqError):
    pass


def _check_policy(cls, policy) -> Policy:
    policy = Policy.parse(policy)
    if policy not in cls.POLICIES:
        names = ", ".join(p.value for p in cls.POLICIES)
        raise UnsupportedPolicy(f"{cls.NAME} supports {names}, not {policy.value}")
    return policy


def _check_cell(i: int, j: int, m: int, n: int) -> None:
    if not (1 <= i <= m and 1 <= j <= n):
        raise IndexOutOfRange(f"({i},{j}) outside {m}x{n}")


def _check_cols(j1: int, j2: int, n: int) -> None:
    if j1 > j2:
        raise RangeInverted(f"column range [{j1}, {j2}] is inverted")
    if j1 < 1 or j2 > n:
        raise IndexOutOfRange(f"column range [{j1}, {j2}] outside [1, {n}]")


class Encoding2D(Encoded):
    POLICIES: ClassVar[tuple[Policy, ...]] = (ROW_MAJOR, COL_MAJOR)
    QCLASS: ClassVar[QueryClass] = QueryClass.FOUR_SIDED

    m: int
    n: int
    policy: Policy

    def query_rect(self, rect: Rect) -> Pos2D:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# answer grids and staircases


def answers_dp(a, policy=ROW_MAJOR) -> list[list[Pos2D]]:
    """Answers of every 2-sided query [1,i] x [1,j], as a 0-indexed grid."""
    a = as_array(a)
    policy = Policy.parse(policy)
    vals = a.cells.tolist()
    m, n = a.m, a.n

    def key(p):
        return (vals[p[0] - 1][p[1] - 1], policy.key(p[0], p[1]))

    out: list[list[Pos2D]] = []
    for i in range(1, m + 1):
        row = []
        for j in range(1, n + 1):
            best = Pos2D(i, j)
            if i > 1:
                best = min(best, out[i - 2][j - 1], key=key)
            if j > 1:
                best = min(best, row[j - 2], key=key)
            row.append(best)
        out.append(row)
    return out


@dataclass(frozen=True)
class Staircase:
    level: int
    points: tuple[Pos2D, ...]  # increasing column, strictly decreasing row


def staircases(a, policy=ROW_MAJOR) -> list[Staircase]:
    """Cumulative staircases: level l holds the dominance-minimal answer
    positions among those with value <= l."""
    a = as_array(a)
    grid = answers_dp(a, policy)
    answers = sorted({p for row in grid for p in row}, key=lambda p: (p[1], p[0]))
    vals = [a.at(*p) for p in answers]
    out = []
    for level in range(a.sigma):
        pts = []
        best_row = a.m + 1
        for p, v in zip(answers, vals):
            if v <= level and p[0] < best_row:
                pts.append(p)
                best_row = p[0]
        out.append(Staircase(level, tuple(pts)))
    return out


def path_bits(stair: Staircase, m: int, n: int) -> BitVec:
    """Lattice path from (m+1, 0) to (0, n+1); 1 = east, 0 = north.

    For each point in turn: east to its column, then north to its row.
    """
    bits: list[int] = []
    row, col = m + 1, 0
    for p in stair.points:
        r, c = p
        if not (1 <= r <= m and 1 <= c <= n) or c <= col or r >= row:
            raise InvalidStaircase(f"point {p} breaks the staircase order")
        bits += [1] * (c - col) + [0] * (row - r)
        row, col = r, c
    bits += [1] * (n + 1 - col) + [0] * row
    return BitVec(bits)


class TwoSidedStaircase(Encoding2D):
    """One lattice path per value level; a query binary-searches the first
    level whose staircase it dominates, then reads the answer off that path."""

    TAG = 20
    NAME = "twosided_staircase"
    QCLASS = QueryClass.TWO_SIDED

    def __init__(self, a, policy=ROW_MAJOR):
        a = as_array(a)
        self.policy = _check_policy(type(self), policy)
        self.m, self.n, self.sigma = a.m, a.n, a.sigma
        self.paths = [path_bits(s, a.m, a.n) for s in staircases(a, self.policy)]
        self.level_tests = 0

    def _covers(self, level: int, i: int, j: int) -> bool:
        self.level_tests += 1
        b = self.paths[level]
        return i >= self.m + 1 - b.rank0(b.select1(j + 1) - 1)

    def query(self, i: int, j: int) -> Pos2D:
        _check_cell(i, j, self.m, self.n)
        self.level_tests = 0
        lo, hi = 0, self.sigma - 1  # the top level covers every cell
        while lo < hi:
            mid = (lo + hi) // 2
            if self._covers(mid, i, j):
                hi = mid
            else:
                lo = mid + 1
        b = self.paths[lo]
        if self.policy is ROW_MAJOR:
            z = b.rank0(b.select1(j + 1))
            return Pos2D(self.m + 1 - z, b.rank1(b.select0(z)))
        c = b.rank1(b.select0(self.m + 1 - i))
        return Pos2D(self.m + 1 - b.rank0(b.select1(c + 1)), c)

    def query_rect(self, rect: Rect) -> Pos2D:
        return self.query(rect.r2, rect.c2)

    def _header(self):
        return {"m": self.m, "n": self.n, "sigma": self.sigma, "policy": self.policy.value}

    def _parts(self):
        return {"paths": {str(k): p for k, p in enumerate(self.paths)}}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.m, self.n, self.sigma = header["m"], header["n"], header["sigma"]
        self.policy = Policy(header["policy"])
        self.paths = [parts["paths"][str(k)] for k in range(self.sigma)]
        self.level_tests = 0
        return self


# ---------------------------------------------------------------------------
# 1-sided and 2-sided via 1D structures


class OneSided2D(Encoding2D):
    """Columns where the prefix answer changes, plus the answer rows there."""

    TAG = 21
    NAME = "onesided2d"
    QCLASS = QueryClass.ONE_SIDED

    def __init__(self, a, policy=ROW_MAJOR, sparse: bool | None = None):
        a = as_array(a)
        self.policy = _check_policy(type(self), policy)
        self.m, self.n = a.m, a.n
        cells = a.cells
        colmin = cells.min(axis=0).astype(np.int64)
        toprow = cells.argmin(axis=0).astype(np.int64)
        # later columns lose ties, so a column changes the answer iff its key is a strict prefix minimum
        key = colmin * (self.m + 1) + toprow if self.policy is ROW_MAJOR else colmin
        before = np.concatenate(([np.iinfo(np.int64).max], np.minimum.accumulate(key)[:-1]))
        change = key < before
        self.B = make_bits(change.astype(np.uint8), sparse)
        self._rows = toprow[change].tolist()
        self.row_bits = bits_for(self.m)

    def query(self, j: int) -> Pos2D:
        if not 1 <= j <= self.n:
            raise IndexOutOfRange(f"column {j} outside [1, {self.n}]")
        k = self.B.rank1(j)
        return Pos2D(self._rows[k - 1] + 1, self.B.select1(k))

    def query_rect(self, rect: Rect) -> Pos2D:
        return self.query(rect.c2)

    def _header(self):
        return {"m": self.m, "n": self.n, "policy": self.policy.value}

    def _parts(self):
        return {"B": self.B, "rows": Field(self._rows, self.row_bits)}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.m, self.n = header["m"], header["n"]
        self.policy = Policy(header["policy"])
        self.B = parts["B"]
        self._rows = list(parts["rows"].values)
        self.row_bits = parts["rows"].width
        return self


class TwoSidedGeneral(Encoding2D):
    """Column-major 2-sided RMQ from two general 1D structures.

    The first runs over the row-major concatenation of the prefix column
    minima (row i holds min of A[1..i][j]) and picks the column; the second
    runs over the column-major concatenation of A and picks the row.
    """

    TAG = 22
    NAME = "twosided_general"
    QCLASS = QueryClass.TWO_SIDED
    POLICIES = (COL_MAJOR,)

    def __init__(self, a, policy=COL_MAJOR):
        a = as_array(a)
        self.policy = _check_policy(type(self), policy)
        self.m, self.n = a.m, a.n
        prefix = np.minimum.accumulate(a.cells, axis=0)
        self.by_row = Rmq1DGeneral(prefix.ravel())
        self.by_col = Rmq1DGeneral(a.cells.T.ravel())

    def query(self, i: int, j: int) -> Pos2D:
        _check_cell(i, j, self.m, self.n)
        off = (i - 1) * self.n
        col = self.by_row.query(off + 1, off + j) - off
        off = (col - 1) * self.m
        return Pos2D(self.by_col.query(off + 1, off + i) - off, col)

    def query_rect(self, rect: Rect) -> Pos2D:
        return self.query(rect.r2, rect.c2)

    def _header(self):
        return {"m": self.m, "n": self.n}

    def _parts(self):
        return {"prefix_rows": self.by_row, "columns": self.by_col}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.m, self.n = header["m"], header["n"]
        self.policy = COL_MAJOR
        self.by_row, self.by_col = parts["prefix_rows"], parts["columns"]
        return self


# ---------------------------------------------------------------------------
# 3-sided


def ck_array(a, k: int) -> list[int]:
    """Per column: the topmost row holding k with only larger values above it.

    0 if k occurs only below a smaller value, m+1 if k does not occur.
    """
    a = as_array(a)
    out = []
    for col in a.cells.T.tolist():
        r = a.m + 1
        for idx, v in enumerate(col):
            if v < k:
                r = 0 if k in col[idx:] else a.m + 1
                break
            if v == k:
                r = idx + 1
                break
        out.append(r)
    return out


def topmost_at_most(a, k: int) -> np.ndarray:
    """Per column: the topmost row whose value is <= k, or m+1."""
    a = as_array(a)
    hit = a.cells <= k
    return np.where(hit.any(axis=0), hit.argmax(axis=0) + 1, a.m + 1)


class ThreeSidedCk(Encoding2D):
    """3-sided queries [1,i] x [j1,j2] by binary search over value levels.

    Level k stores, per column, the topmost row holding a value <= k, with a
    1D RMQ over it: level k is present in the query iff the smallest entry in
    [j1, j2] is at most i, a test that is monotone in k.
    """

    TAG = 23
    NAME = "threesided"
    QCLASS = QueryClass.THREE_SIDED
    POLICIES = (ROW_MAJOR,)

    def __init__(self, a, policy=ROW_MAJOR):
        a = as_array(a)
        self.policy = _check_policy(type(self), policy)
        self.m, self.n, self.sigma = a.m, a.n, a.sigma
        self.levels = []
        self.rmqs = []
        for k in range(self.sigma):
            d = topmost_at_most(a, k)
            self.levels.append(PackedArray(d, self.m + 2))
            self.rmqs.append(Rmq1DGeneral(d))
        self.presence_tests = 0

    def _present(self, k: int, i: int, j1: int, j2: int) -> int:
        """Column of the topmost hit at level k, or 0 if none within rows 1..i."""
        self.presence_tests += 1
        jk = self.rmqs[k].query(j1, j2)
        return jk if self.levels[k].get(jk) <= i else 0

    def query(self, i: int, j1: int, j2: int) -> Pos2D:
        _check_cols(j1, j2, self.n)
        if not 1 <= i <= self.m:
            raise IndexOutOfRange(f"row {i} outside [1, {self.m}]")
        self.presence_tests = 0
        lo, hi = 0, self.sigma - 1  # every cell is <= sigma - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self._present(mid, i, j1, j2):
                hi = mid
            else:
                lo = mid + 1
        jk = self.rmqs[lo].query(j1, j2)
        return Pos2D(self.levels[lo].get(jk), jk)

    def query_rect(self, rect: Rect) -> Pos2D:
        return self.query(rect.r2, rect.c1, rect.c2)

    def _header(self):
        return {"m": self.m, "n": self.n, "sigma": self.sigma}

    def _parts(self):
        return {
            "levels": {str(k): p for k, p in enumerate(self.levels)},
            "level_rmq": {str(k): r for k, r in enumerate(self.rmqs)},
        }

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.m, self.n, self.sigma = header["m"], header["n"], header["sigma"]
        self.policy = ROW_MAJOR
        self.levels = [parts["levels"][str(k)] for k in range(self.sigma)]
        self.rmqs = [parts["level_rmq"][str(k)] for k in range(self.sigma)]
        self.presence_tests = 0
        return self


# ---------------------------------------------------------------------------
# column-spanning


class ColSpan2D(Encoding2D):
    """Column minima with a 1D RMQ over them, plus the topmost row of each minimum."""

    TAG = 24
    NAME = "colspan"
    QCLASS = QueryClass.COL_SPAN
    POLICIES = (COL_MAJOR,)
    BOUNDED_UPTO = 4

    def __init__(self, a, policy=COL_MAJOR):
        a = as_array(a)
        self.policy = _check_policy(type(self), policy)
        self.m, self.n = a.m, a.n
        mins = a.cells.min(axis=0)
        if a.sigma <= self.BOUNDED_UPTO:
            self.minima = Rmq1DBounded(mins, a.sigma)
        else:
            self.minima = Rmq1DGeneral(mins)
        self.rows = PackedArray(a.cells.argmin(axis=0), max(self.m, 2))

    def query(self, j1: int, j2: int) -> Pos2D:
        _check_cols(j1, j2, self.n)
        col = self.minima.query(j1, j2)
        return Pos2D(self.rows.get(col) + 1, col)

    def query_rect(self, rect: Rect) -> Pos2D:
        return self.query(rect.c1, rect.c2)

    def _header(self):
        return {"m": self.m, "n": self.n}

    def _parts(self):
        return {"minima_rmq": self.minima, "rows": self.rows}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.m, self.n = header["m"], header["n"]
        self.policy = COL_MAJOR
        self.minima, self.rows = parts["minima_rmq"], parts["rows"]
        return self


# ---------------------------------------------------------------------------
# 4-sided


class MinTreeIndex(Encoded):
    """Packed values with a min-tree over fixed groups; leftmost-minimum queries.

    Query cost is O(group + log n); space is the values plus roughly
    2/group of them again for the tree.
    """

    TAG = 25
    NAME = "min_tree_index"
    GROUP = 16

    def __init__(self, values, sigma: int, group: int = GROUP):
        vals = np.asarray(values, dtype=np.int64).ravel()
        self.count, self.sigma, self.group = int(vals.size), sigma, group
        self._vals = vals.tolist()
        ngroups = max(1, -(-self.count // group))
        size = 1 << (ngroups - 1).bit_length()
        padded = np.full(ngroups * group, sigma, dtype=np.int64)
        padded[: self.count] = vals
        tree = np.full(2 * size, sigma, dtype=np.int64)
        tree[size : size + ngroups] = padded.reshape(ngroups, group).min(axis=1)
        for v in range(size - 1, 0, -1):
            tree[v] = min(tree[2 * v], tree[2 * v + 1])
        self._tree = tree.tolist()

    def _scan(self, lo: int, hi: int) -> int:
        seg = self._vals[lo : hi + 1]
        return lo + seg.index(min(seg))

    def query(self, i: int, j: int) -> int:
        """Leftmost minimum position in the 1-based range [i, j]."""
        lo, hi, g = i - 1, j - 1, self.group
        gl, gr = lo // g, hi // g
        if gl == gr:
            return self._scan(lo, hi) + 1
        best = self._scan(lo, gl * g + g - 1)
        if gr - gl > 1:
            k = self._leftmost_group(gl + 1, gr - 1)
            if self._tree[len(self._tree) // 2 + k] < self._vals[best]:
                best = self._scan(k * g, k * g + g - 1)
        right = self._scan(gr * g, hi)
        if self._vals[right] < self._vals[best]:
            best = right
        return best + 1

    def _leftmost_group(self, kl: int, kr: int) -> int:
        tree = self._tree
        size = len(tree) // 2
        lo, hi = kl + size, kr + size + 1
        left, right = [], []
        while lo < hi:
            if lo & 1:
                left.append(lo)
                lo += 1
            if hi & 1:
                hi -= 1
                right.append(hi)
            lo >>= 1
            hi >>= 1
        nodes = left + right[::-1]
        val = min(tree[v] for v in nodes)
        v = next(v for v in nodes if tree[v] == val)
        while v < size:
            v = 2 * v if tree[2 * v] == val else 2 * v + 1
        return v - size

    def _header(self):
        return {"count": self.count, "sigma": self.sigma, "group": self.group}

    def _parts(self):
        return {
            "values": Field(self._vals, bits_for(self.sigma)),
            "group_min": Field(self._tree, bits_for(self.sigma + 1)),
        }

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.count, self.sigma, self.group = header["count"], header["sigma"], header["group"]
        self._vals = list(parts["values"].values)
        self._tree = list(parts["group_min"].values)
        return self


def default_side(m: int, n: int, sigma: int) -> int:
    if sigma <= 1:
        return 2
    c = max(2, int(0.5 * math.sqrt(math.log2(m * n) / math.log2(sigma))) if m * n > 1 else 2)
    width = bits_for(sigma)
    while c > 1 and c * c * width > 28:
        c -= 1
    return c


def _sparse_levels(keys: np.ndarray) -> list[list[np.ndarray]]:
    # levels[a][b][r, c] = min of keys[r : r + 2^a, c : c + 2^b]
    rows = [keys]
    while (1 << len(rows)) <= keys.shape[0]:
        prev, h = rows[-1], 1 << (len(rows) - 1)
        rows.append(np.minimum(prev[:-h], prev[h:]))
    out = []
    for base in rows:
        cols = [base]
        while (1 << len(cols)) <= keys.shape[1]:
            prev, w = cols[-1], 1 << (len(cols) - 1)
            cols.append(np.minimum(prev[:, :-w], prev[:, w:]))
        out.append(cols)
    return out


class FourSidedBlocked(Encoding2D):
    """4-sided RMQ over c x c blocks.

    Each block is stored as its content index (the cells as base-sigma
    digits); in-block answers come from a table keyed by content that is
    filled on demand.  Row strips use per-block row minima, column strips
    per-block column minima, and the block-aligned core a 2D sparse table
    over block minima.
    """

    TAG = 26
    NAME = "foursided"
    QCLASS = QueryClass.FOUR_SIDED

    def __init__(self, a, policy=ROW_MAJOR, c: int | None = None):
        a = as_array(a)
        self.policy = _check_policy(type(self), policy)
        self.m, self.n, self.sigma = m, n, sigma = a.m, a.n, a.sigma
        self.c = c = default_side(m, n, sigma) if c is None else c
        if c < 1:
            raise RmqError("block side must be >= 1")
        mb, nb = -(-m // c), -(-n // c)
        self.mb, self.nb = mb, nb
        cells = a.cells.astype(np.int64)

        grid = np.full((mb * c, nb * c), sigma - 1, dtype=np.int64)
        grid[:m, :n] = cells
        digits = grid.reshape(mb, c, nb, c).transpose(0, 2, 1, 3).reshape(mb * nb, c * c)
        content = np.zeros(mb * nb, dtype=object if sigma ** (c * c) > 1 << 62 else np.int64)
        for k in range(c * c):
            content = content * sigma + digits[:, k]
        self._content = content.tolist()

        big = np.full((mb * c, nb * c), sigma, dtype=np.int64)
        big[:m, :n] = cells
        row_min = big.reshape(mb * c, nb, c).min(axis=2)[:m]  # m x nb
        col_min = big.reshape(mb, c, nb * c).min(axis=1)[:, :n]  # mb x n
        self.row_strips = MinTreeIndex(row_min, sigma)
        self.col_strips = MinTreeIndex(col_min.T, sigma)

        blocks = big.reshape(mb, c, nb, c)
        order = (0, 2, 1, 3) if self.policy is ROW_MAJOR else (0, 2, 3, 1)
        flat = blocks.transpose(order).reshape(mb, nb, c * c)
        arg = flat.argmin(axis=2)
        core_vals = flat.min(axis=2)
        lr, lc = (arg // c, arg % c) if self.policy is ROW_MAJOR else (arg % c, arg // c)
        rr = np.arange(mb)[:, None] * c + lr
        cc = np.arange(nb)[None, :] * c + lc
        rank = rr * n + cc if self.policy is ROW_MAJOR else cc * m + rr
        keys = core_vals * (m * n) + rank
        self._core_vals = core_vals.ravel().tolist()
        self._set_core(keys)
        self._memo: dict = {}
        self.fragments = 0

    def _set_core(self, keys: np.ndarray) -> None:
        dtype = np.int32 if self.sigma * self.m * self.n < 1 << 31 else np.int64
        self._levels = [[lv.astype(dtype) for lv in row] for row in _sparse_levels(keys)]

    # -- in-block answers -------------------------------------------------

    def _digits(self, content: int) -> list[int]:
        out = []
        for _ in range(self.c * self.c):
            content, d = divmod(content, self.sigma)
            out.append(d)
        return out[::-1]

    def _local(self, bi: int, bj: int, r1: int, r2: int, c1: int, c2: int) -> tuple[int, int, int]:
        """(value, row, col) of the in-block answer for local 0-based inclusive bounds."""
        content = self._content[bi * self.nb + bj]
        key = (content, r1, r2, c1, c2)
        hit = self._memo.get(key)
        if hit is None:
            d = self._digits(content)
            c = self.c
            cells = ((d[r * c + q], self.policy.key(r, q), r, q) for r in range(r1, r2 + 1) for q in range(c1, c2 + 1))
            v, _, r, q = min(cells)
            hit = self._memo[key] = (v, r, q)
        return hit

    def _block_candidate(self, bi, bj, r1, r2, c1, c2) -> Candidate:
        c = self.c
        v, r, q = self._local(bi, bj, r1 - bi * c, r2 - bi * c, c1 - bj * c, c2 - bj * c)
        return Candidate(v, Pos2D(bi * c + r + 1, bj * c + q + 1))

    # -- decomposition ----------------------------------------------------

    def _segments(self, lo: int, hi: int, size: int) -> list[tuple]:
        """Split 0-based [lo, hi] into ("part", block, lo, hi) and ("full", b1, b2)."""
        c = self.c
        b1, b2 = lo // c, hi // c
        segs: list[tuple] = []

        def is_full(b, s, e):
            return s == b * c and e == min(b * c + c, size) - 1

        if b1 == b2:
            return [("full", b1, b1)] if is_full(b1, lo, hi) else [("part", b1, lo, hi)]
        first, last = b1, b2
        if not is_full(b1, lo, b1 * c + c - 1):
            segs.append(("part", b1, lo, b1 * c + c - 1))
            first += 1
        tail = None
        if not is_full(b2, b2 * c, hi):
            tail = ("part", b2, b2 * c, hi)
            last -= 1
        if first <= last:
            segs.append(("full", first, last))
        if tail:
            segs.append(tail)
        return segs

    def _core(self, a1: int, a2: int, b1: int, b2: int) -> Candidate:
        ka = (a2 - a1 + 1).bit_length() - 1
        kb = (b2 - b1 + 1).bit_length() - 1
        t = self._levels[ka][kb]
        best = min(
            int(t[a1, b1]),
            int(t[a2 - (1 << ka) + 1, b1]),
            int(t[a1, b2 - (1 << kb) + 1]),
            int(t[a2 - (1 << ka) + 1, b2 - (1 << kb) + 1]),
        )
        v, rank = divmod(best, self.m * self.n)
        if self.policy is ROW_MAJOR:
            r, q = divmod(rank, self.n)
        else:
            q, r = divmod(rank, self.m)
        return Candidate(v, Pos2D(r + 1, q + 1))

    def decompose(self, r1: int, r2: int, c1: int, c2: int) -> list[tuple]:
        """Fragments of a 1-based rect, 0-based inclusive.

        ("block", lo_row, hi_row, lo_col, hi_col) lies inside one block;
        ("rows", row, b1, b2) is one row across full column blocks b1..b2;
        ("cols", col, b1, b2) is one column across full row blocks;
        ("core", a1, a2, b1, b2) is a run of whole blocks.
        """
        Rect(r1, r2, c1, c2).check(self.m, self.n)
        out = []
        for rs in self._segments(r1 - 1, r2 - 1, self.m):
            for cs in self._segments(c1 - 1, c2 - 1, self.n):
                if rs[0] == "part" and cs[0] == "part":
                    out.append(("block", rs[2], rs[3], cs[2], cs[3]))
                elif rs[0] == "part":
                    out.extend(("rows", r, cs[1], cs[2]) for r in range(rs[2], rs[3] + 1))
                elif cs[0] == "part":
                    out.extend(("cols", q, rs[1], rs[2]) for q in range(cs[2], cs[3] + 1))
                else:
                    out.append(("core", rs[1], rs[2], cs[1], cs[2]))
        return out

    def _fragment_min(self, frag: tuple) -> Candidate:
        c = self.c
        kind = frag[0]
        if kind == "block":
            _, lo, hi, left, right = frag
            return self._block_candidate(lo // c, left // c, lo, hi, left, right)
        if kind == "rows":
            _, r, b1, b2 = frag
            off = r * self.nb
            bj = self.row_strips.query(off + b1 + 1, off + b2 + 1) - off - 1
            return self._block_candidate(r // c, bj, r, r, bj * c, min(bj * c + c, self.n) - 1)
        if kind == "cols":
            _, q, b1, b2 = frag
            off = q * self.mb
            bi = self.col_strips.query(off + b1 + 1, off + b2 + 1) - off - 1
            return self._block_candidate(bi, q // c, bi * c, min(bi * c + c, self.m) - 1, q, q)
        return self._core(*frag[1:])

    def query(self, r1: int, r2: int, c1: int, c2: int) -> Pos2D:
        cands = [self._fragment_min(f) for f in self.decompose(r1, r2, c1, c2)]
        self.fragments = len(cands)
        return policy_min(cands, self.policy).pos

    def query_rect(self, rect: Rect) -> Pos2D:
        return self.query(rect.r1, rect.r2, rect.c1, rect.c2)

    def cells(self) -> list[list[int]]:
        """Reassemble the array from the stored block contents."""
        c = self.c
        out = [[0] * self.n for _ in range(self.m)]
        for bi in range(self.mb):
            for bj in range(self.nb):
                d = self._digits(self._content[bi * self.nb + bj])
                for r in range(c):
                    for q in range(c):
                        R, Q = bi * c + r, bj * c + q
                        if R < self.m and Q < self.n:
                            out[R][Q] = d[r * c + q]
        return out

    # -- storage ----------------------------------------------------------

    def _header(self):
        return {"m": self.m, "n": self.n, "sigma": self.sigma, "c": self.c, "policy": self.policy.value}

    def _parts(self):
        flat = np.concatenate([lv.ravel() for row in self._levels for lv in row])
        return {
            "blocks": Field(self._content, bits_for(self.sigma ** (self.c * self.c))),
            "row_strips": self.row_strips,
            "col_strips": self.col_strips,
            "core": {
                "values": Field(self._core_vals, bits_for(self.sigma)),
                "directory": Field(flat, bits_for(self.sigma * self.m * self.n)),
            },
        }

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.m, self.n, self.sigma, self.c = header["m"], header["n"], header["sigma"], header["c"]
        self.policy = Policy(header["policy"])
        self.mb, self.nb = -(-self.m // self.c), -(-self.n // self.c)
        self._content = list(parts["blocks"].values)
        self.row_strips, self.col_strips = parts["row_strips"], parts["col_strips"]
        self._core_vals = list(parts["core"]["values"].values)
        flat = np.asarray(parts["core"]["directory"].values, dtype=np.int64)
        shapes = [[lv.shape for lv in row] for row in _sparse_levels(np.zeros((self.mb, self.nb), dtype=np.int8))]
        levels, pos = [], 0
        for row in shapes:
            cur = []
            for h, w in row:
                cur.append(flat[pos : pos + h * w].reshape(h, w))
                pos += h * w
            levels.append(cur)
        dtype = np.int32 if self.sigma * self.m * self.n < 1 << 31 else np.int64
        self._levels = [[lv.astype(dtype) for lv in row] for row in levels]
        self._memo = {}
        self.fragments = 0
        return self


# ---------------------------------------------------------------------------
# functional entry points


def onesided2d_build(a, policy=ROW_MAJOR) -> OneSided2D:
    return OneSided2D(a, policy)


def onesided2d_query(s: OneSided2D, j: int) -> Pos2D:
    return s.query(j)


def twosided_general_build(a, policy=COL_MAJOR) -> TwoSidedGeneral:
    return TwoSidedGeneral(a, policy)


def twosided_general_query(s: TwoSidedGeneral, i: int, j: int) -> Pos2D:
    return s.query(i, j)


def twosided_staircase_build(a, policy=ROW_MAJOR) -> TwoSidedStaircase:
    return TwoSidedStaircase(a, policy)


def twosided_staircase_query(s: TwoSidedStaircase, i: int, j: int) -> Pos2D:
    return s.query(i, j)


def threesided_build(a, policy=ROW_MAJOR) -> ThreeSidedCk:
    return ThreeSidedCk(a, policy)


def threesided_query(s: ThreeSidedCk, i: int, j1: int, j2: int) -> Pos2D:
    return s.query(i, j1, j2)


def colspan_build(a, policy=COL_MAJOR) -> ColSpan2D:
    return ColSpan2D(a, policy)


def colspan_query(s: ColSpan2D, j1: int, j2: int) -> Pos2D:
    return s.query(j1, j2)


def foursided_build(a, policy=ROW_MAJOR, c: int | None = None) -> FourSidedBlocked:
    return FourSidedBlocked(a, policy, c)


def foursided_query(s: FourSidedBlocked, rect: Rect) -> Pos2D:
    return s.query_rect(rect)
