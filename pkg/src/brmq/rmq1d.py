"""One-dimensional RMQ: Cartesian trees and the four 1D encodings.

All queries are 1-based and inclusive and return the leftmost position of
the range minimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitseq import BitVec, make_bits
from .codec import Encoded, Field
from .core import AlphabetViolation, Array2D, IndexOutOfRange, RangeInverted, RmqError, bits_for
from .treecount import count_trees, rank_subset, rank_tree, unrank_subset, unrank_tree


class EmptyArray(RmqError):
    pass


def _as_1d(a) -> list[int]:
    if isinstance(a, Array2D):
        if a.m != 1:
            raise RmqError(f"expected a 1D array (m == 1), got {a.m} rows")
        return a.cells[0].tolist()
    if isinstance(a, np.ndarray):
        return a.ravel().tolist()
    return list(a)


def _check_range(i: int, j: int, n: int) -> None:
    if i > j:
        raise RangeInverted(f"range [{i}, {j}] is inverted")
    if i < 1 or j > n:
        raise IndexOutOfRange(f"range [{i}, {j}] outside [1, {n}]")


# ---------------------------------------------------------------------------
# Cartesian trees


@dataclass(frozen=True)
class TreeShape:
    """Unlabelled binary tree over in-order nodes 1..n (0 marks a missing child)."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    root: int

    @property
    def n(self) -> int:
        return len(self.left)

    def children(self, v: int) -> tuple[int, int]:
        return self.left[v - 1], self.right[v - 1]

    def bp(self) -> list[int]:
        """Balanced-parenthesis bits (1 = open) of the tree, 2n bits.

        Written by the left-to-right stack scan that pushes node v after
        popping the right spine of v's left subtree; a bijective encoding of
        the topology.
        """
        out: list[int] = []
        depth_stack: list[int] = []

        def right_spine(u: int) -> int:
            k = 0
            while u:
                k += 1
                u = self.right[u - 1]
            return k

        for v in range(1, self.n + 1):
            pops = right_spine(self.left[v - 1])
            for _ in range(pops):
                depth_stack.pop()
                out.append(0)
            depth_stack.append(v)
            out.append(1)
        out.extend([0] * len(depth_stack))
        return out


def cartesian_tree(a) -> TreeShape:
    vals = _as_1d(a)
    n = len(vals)
    if n == 0:
        raise EmptyArray("Cartesian tree of an empty array")
    left = [0] * n
    right = [0] * n
    stack: list[int] = []
    for i, v in enumerate(vals):
        last = 0
        while stack and vals[stack[-1]] > v:
            last = stack.pop() + 1
        left[i] = last
        if stack:
            right[stack[-1]] = i + 1
        stack.append(i)
    return TreeShape(tuple(left), tuple(right), stack[0] + 1)


def left_height(t: TreeShape) -> int:
    best = 0
    todo = [(t.root, 0)] if t.n else []
    while todo:
        v, h = todo.pop()
        best = max(best, h)
        lc, rc = t.children(v)
        if lc:
            todo.append((lc, h + 1))
        if rc:
            todo.append((rc, h))
    return best


def _stack_bits(vals: list[int]) -> bytearray:
    out = bytearray()
    st: list[int] = []
    push, pop, emit = st.append, st.pop, out.append
    for v in vals:
        while st and st[-1] > v:
            pop()
            emit(0)
        push(v)
        emit(1)
    out.extend(bytes(len(st)))
    return out


# byte tables over excess steps: (delta, min prefix, rightmost offset of that min)
def _byte_table():
    tab = []
    for b in range(256):
        e, mn, arg = 0, 1 << 30, 0
        for k in range(8):
            e += 1 if b >> k & 1 else -1
            if e <= mn:
                mn, arg = e, k + 1
        tab.append((e, mn, arg))
    return tab


_EXCESS_TAB = _byte_table()


class Rmq1DGeneral(Encoded):
    """Succinct RMQ over the balanced-parenthesis sequence of the array's stack scan.

    With open_i the position of the i-th opening bit, rmq(i, j) is one past
    the number of opening bits before the rightmost minimum of the excess on
    [open_i - 1, open_j].  Excess minima are found through a min-tree over
    fixed blocks of the sequence plus byte lookup tables inside blocks.
    """

    TAG = 10
    NAME = "rmq1d_general"
    BLOCK = 256

    def __init__(self, a, block: int = BLOCK):
        vals = _as_1d(a)
        self.n = len(vals)
        if self.n == 0:
            raise EmptyArray("RMQ structure over an empty array")
        if block % 8:
            raise RmqError("block must be a multiple of 8")
        self.block = block
        bits = np.frombuffer(bytes(_stack_bits(vals)), dtype=np.uint8)
        self.bp = BitVec(bits)
        self._tree = self._build_tree(bits)
        self._init()

    def _build_tree(self, bits: np.ndarray) -> list[int]:
        excess = np.concatenate(([0], np.cumsum(bits.astype(np.int64) * 2 - 1)))
        nblocks = len(excess) // self.block + 1
        size = 1 << max(nblocks - 1, 0).bit_length()
        pad = self.n + 1
        padded = np.full(nblocks * self.block, pad, dtype=np.int64)
        padded[: len(excess)] = excess
        leaves = padded.reshape(nblocks, self.block).min(axis=1)
        tree = np.full(2 * size, pad, dtype=np.int64)
        tree[size : size + nblocks] = leaves
        for v in range(size - 1, 0, -1):
            tree[v] = min(tree[2 * v], tree[2 * v + 1])
        return tree.tolist()

    def _init(self) -> None:
        self._size = len(self._tree) // 2
        self._words = self.bp._words
        self._len = self.bp.length

    # -- excess scanning --------------------------------------------------

    def _scan(self, lo: int, hi: int, e: int) -> tuple[int, int]:
        """Rightmost minimum of the excess over positions lo..hi, given E(lo) = e."""
        words = self._words
        best_e, best_p = e, lo
        p = lo
        tab = _EXCESS_TAB
        while p < hi:
            if not p & 7 and p + 8 <= hi:
                d, mn, k = tab[(words[p >> 6] >> (p & 63)) & 0xFF]
                if e + mn <= best_e:
                    best_e, best_p = e + mn, p + k
                e += d
                p += 8
            else:
                e += 1 if (words[p >> 6] >> (p & 63)) & 1 else -1
                p += 1
                if e <= best_e:
                    best_e, best_p = e, p
        return best_e, best_p

    def _excess(self, p: int) -> int:
        return 2 * self.bp.rank1(p) - p

    def _tree_range(self, kl: int, kr: int) -> tuple[int, int]:
        """(min, rightmost block) over blocks kl..kr."""
        tree, size = self._tree, self._size
        lo, hi = kl + size, kr + size + 1
        left_nodes, right_nodes = [], []
        while lo < hi:
            if lo & 1:
                left_nodes.append(lo)
                lo += 1
            if hi & 1:
                hi -= 1
                right_nodes.append(hi)
            lo >>= 1
            hi >>= 1
        nodes = left_nodes + right_nodes[::-1]
        val = min(tree[v] for v in nodes)
        v = next(v for v in reversed(nodes) if tree[v] == val)
        while v < size:
            v = 2 * v + 1 if tree[2 * v + 1] == val else 2 * v
        return val, v - size

    def _rightmost_min(self, a: int, b: int) -> int:
        B = self.block
        ka, kb = a // B, b // B
        if ka == kb:
            return self._scan(a, b, self._excess(a))[1]
        best = self._scan(a, (ka + 1) * B - 1, self._excess(a))
        if kb - ka > 1:
            val, k = self._tree_range(ka + 1, kb - 1)
            if val <= best[0]:
                lo = k * B
                best = self._scan(lo, lo + B - 1, self._excess(lo))
        lo = kb * B
        right = self._scan(lo, b, self._excess(lo))
        if right[0] <= best[0]:
            best = right
        return best[1]

    def query(self, i: int, j: int) -> int:
        _check_range(i, j, self.n)
        if i == j:
            return i
        a = self.bp.select1(i) - 1
        b = self.bp.select1(j)
        return self.bp.rank1(self._rightmost_min(a, b)) + 1

    # -- storage ----------------------------------------------------------

    def _header(self):
        return {"n": self.n, "block": self.block}

    def _parts(self):
        return {"bp": self.bp, "block_min": Field(self._tree, bits_for(self.n + 2))}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.n, self.block = header["n"], header["block"]
        self.bp = parts["bp"]
        self._tree = list(parts["block_min"].values)
        self._init()
        return self


# ---------------------------------------------------------------------------
# bounded alphabet


@lru_cache(maxsize=1 << 16)
def _block_shape(size: int, k: int, type_id: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(node depths, left spine) for an unranked block tree, in-order 0-based."""
    left, right, root = unrank_tree(size, k, type_id)
    depth = [0] * size
    todo = [(root, 0)]
    while todo:
        v, d = todo.pop()
        depth[v] = d
        if left[v] >= 0:
            todo.append((left[v], d + 1))
        if right[v] >= 0:
            todo.append((right[v], d + 1))
    spine = []
    v = root
    while v >= 0:
        spine.append(v)
        v = left[v]
    return tuple(depth), tuple(spine)


def _block_tree(vals: list[int]) -> tuple[list[int], list[int], int]:
    s = len(vals)
    left = [-1] * s
    right = [-1] * s
    stack: list[int] = []
    for i, v in enumerate(vals):
        last = -1
        while stack and vals[stack[-1]] > v:
            last = stack.pop()
        left[i] = last
        if stack:
            right[stack[-1]] = i
        stack.append(i)
    return left, right, stack[0]


def default_block(n: int) -> int:
    return max(4, math.ceil(math.log2(n))) if n > 1 else 4


class Rmq1DBounded(Encoded):
    """Blocked RMQ whose per-block Cartesian trees are stored as ranks among
    trees of left height <= sigma - 1.

    Cross-block comparisons use the block minima, a general RMQ over them,
    per-block suffix-minimum breakpoints (last offset holding a value <= v,
    for each v < sigma - 1) and the ranked value set of each block's left
    spine, which carries the prefix minima.
    """

    TAG = 11
    NAME = "rmq1d_bounded"

    def __init__(self, a, sigma: int, b: int | None = None):
        vals = _as_1d(a)
        self.n = n = len(vals)
        if n == 0:
            raise EmptyArray("RMQ structure over an empty array")
        if sigma < 1:
            raise AlphabetViolation("sigma must be >= 1")
        if min(vals) < 0 or max(vals) >= sigma:
            raise AlphabetViolation(f"values must lie in [0, {sigma - 1}]")
        self.sigma = sigma
        self.b = b = default_block(n) if b is None else b
        if b < 1:
            raise RmqError("block size must be >= 1")
        kk = self._k()
        nblocks = (n + b - 1) // b
        types, mins, suffix, prefix = [], [], [], []
        memo: dict[tuple[int, ...], tuple] = {}
        for blk in range(nblocks):
            chunk = tuple(vals[blk * b : (blk + 1) * b])
            hit = memo.get(chunk)
            if hit is None:
                hit = memo[chunk] = self._summarize(list(chunk), kk)
            t, mn, suf, pre = hit
            types.append(t)
            mins.append(mn)
            suffix.extend(suf)
            prefix.append(pre)
        self._types, self._mins, self._suffix, self._prefix = types, mins, suffix, prefix
        self.mid = Rmq1DGeneral(mins)
        self._init()

    def _k(self) -> int:
        return min(self.sigma - 1, self.b)

    def _summarize(self, chunk: list[int], kk: int) -> tuple:
        left, right, root = _block_tree(chunk)
        t = rank_tree(left, right, root, len(chunk), kk)
        mn = chunk[root]
        suf = []
        for v in range(self.sigma - 1):
            last = 0
            if v >= mn:
                for off in range(len(chunk) - 1, -1, -1):
                    if chunk[off] <= v:
                        last = off
                        break
            suf.append(last)
        spine_vals = []
        u = left[root]
        while u >= 0:
            spine_vals.append(chunk[u] - mn - 1)
            u = left[u]
        pre = rank_subset(sorted(spine_vals))
        return t, mn, suf, pre

    def _init(self) -> None:
        self.type_bits = bits_for(count_trees(self.b, self._k()))
        u = self.sigma - 1
        self.prefix_bits = bits_for(max(math.comb(u, s) for s in range(u + 1)))

    # -- query ------------------------------------------------------------

    def _shape(self, blk: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        size = min(self.b, self.n - blk * self.b)
        return _block_shape(size, self._k(), self._types[blk])

    def _in_block(self, blk: int, lo: int, hi: int) -> int:
        depth = self._shape(blk)[0]
        d = depth[lo : hi + 1]
        return lo + d.index(min(d))

    def _suffix_value(self, blk: int, off: int) -> int:
        mn = self._mins[blk]
        base = blk * (self.sigma - 1)
        for v in range(mn, self.sigma - 1):
            if off <= self._suffix[base + v]:
                return v
        return self.sigma - 1

    def _prefix_value(self, blk: int, off: int) -> int:
        spine = self._shape(blk)[1]
        mn = self._mins[blk]
        d = spine.index(off)
        if d == 0:
            return mn
        above = unrank_subset(len(spine) - 1, self._prefix[blk])
        return mn + 1 + above[d - 1]

    def query(self, i: int, j: int) -> int:
        _check_range(i, j, self.n)
        b = self.b
        bi, oi = divmod(i - 1, b)
        bj, oj = divmod(j - 1, b)
        if bi == bj:
            return bi * b + self._in_block(bi, oi, oj) + 1
        last = min(b, self.n - bi * b) - 1
        pl = self._in_block(bi, oi, last)
        best = (self._suffix_value(bi, pl), bi * b + pl)
        if bj - bi > 1:
            bm = self.mid.query(bi + 2, bj) - 1
            if self._mins[bm] < best[0]:
                best = (self._mins[bm], bm * b + self._in_block(bm, 0, min(b, self.n - bm * b) - 1))
        pr = self._in_block(bj, 0, oj)
        vr = self._prefix_value(bj, pr)
        if vr < best[0]:
            best = (vr, bj * b + pr)
        return best[1] + 1

    # -- storage ----------------------------------------------------------

    def _header(self):
        return {"n": self.n, "sigma": self.sigma, "b": self.b}

    def _parts(self):
        return {
            "types": Field(self._types, self.type_bits),
            "block_min": Field(self._mins, bits_for(self.sigma)),
            "mid": self.mid,
            "suffix_profile": Field(self._suffix, bits_for(self.b)),
            "prefix_profile": Field(self._prefix, self.prefix_bits),
        }

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.n, self.sigma, self.b = header["n"], header["sigma"], header["b"]
        self._types = list(parts["types"].values)
        self._mins = list(parts["block_min"].values)
        self._suffix = list(parts["suffix_profile"].values)
        self._prefix = list(parts["prefix_profile"].values)
        self.mid = parts["mid"]
        self._init()
        return self


# ---------------------------------------------------------------------------
# 1-sided and binary


class OneSided1D(Encoded):
    """Prefix-minimum positions marked in a bit vector; rmq(1, j) = select1(rank1(j))."""

    TAG = 12
    NAME = "onesided1d"

    def __init__(self, a, sparse: bool | None = None):
        vals = _as_1d(a)
        if not vals:
            raise EmptyArray("1-sided structure over an empty array")
        marks = []
        cur = None
        for v in vals:
            marks.append(1 if cur is None or v < cur else 0)
            if cur is None or v < cur:
                cur = v
        self.n = len(vals)
        self.B = make_bits(marks, sparse)

    def query(self, j: int) -> int:
        if not 1 <= j <= self.n:
            raise IndexOutOfRange(f"prefix end {j} outside [1, {self.n}]")
        return self.B.select1(self.B.rank1(j))

    def context(self):
        return {"n": self.n}

    def _parts(self):
        return {"B": self.B}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.B = parts["B"]
        self.n = len(self.B)
        return self


class BinaryRmq(Encoded):
    """RMQ on a 0/1 array straight from rank0/select0 over the array's own bits."""

    TAG = 13
    NAME = "binary_rmq"

    def __init__(self, a):
        vals = _as_1d(a)
        if not vals:
            raise EmptyArray("binary RMQ over an empty array")
        if any(v not in (0, 1) for v in vals):
            raise AlphabetViolation("binary RMQ needs a 0/1 array")
        self.bits = BitVec(vals)
        self.n = len(vals)

    def query(self, i: int, j: int) -> int:
        _check_range(i, j, self.n)
        bits = self.bits
        before = bits.rank0(i - 1)
        if bits.rank0(j) - before > 0:
            return bits.select0(before + 1)
        return i

    def context(self):
        return {"n": self.n}

    def _parts(self):
        return {"bits": self.bits}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.bits = parts["bits"]
        self.n = len(self.bits)
        return self


def rmq1d_build_general(a) -> Rmq1DGeneral:
    return Rmq1DGeneral(a)


def rmq1d_build_bounded(a, sigma: int, b: int | None = None) -> Rmq1DBounded:
    return Rmq1DBounded(a, sigma, b)


def rmq1d_query(s, i: int, j: int) -> int:
    return s.query(i, j)


def onesided1d_build(a) -> OneSided1D:
    return OneSided1D(a)


def onesided1d_query(s: OneSided1D, j: int) -> int:
    return s.query(j)


def binary_rmq_build(a) -> BinaryRmq:
    return BinaryRmq(a)


def binary_rmq_query(s: BinaryRmq, i: int, j: int) -> int:
    return s.query(i, j)
