"""Rank/select bit vectors and fixed-base packed symbol arrays."""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Sequence

import numpy as np

from .codec import Encoded, Field, Raw
from .core import IndexOutOfRange, RmqError, bits_for

WORD = 64
SUPER_WORDS = 8  # 512-bit superblocks
SUPER_BITS = WORD * SUPER_WORDS
_MASK64 = (1 << 64) - 1

_BYTE_POP = [bin(b).count("1") for b in range(256)]
_BYTE_SEL = [[k for k in range(8) if b >> k & 1] for b in range(256)]


class SelectOutOfRange(IndexOutOfRange):
    pass


class ValueOutOfBase(RmqError):
    pass


def _select_in_word(word: int, k: int) -> int:
    """0-based offset of the k-th (1-based) set bit of ``word``."""
    for shift in range(0, 64, 8):
        b = (word >> shift) & 0xFF
        c = _BYTE_POP[b]
        if k <= c:
            return shift + _BYTE_SEL[b][k - 1]
        k -= c
    raise AssertionError("select past end of word")


def _to_bit_array(bits) -> np.ndarray:
    if isinstance(bits, str):
        bits = [1 if ch == "1" else 0 for ch in bits if ch in "01"]
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if arr.size and arr.max() > 1:
        raise RmqError("bit sequences hold only 0/1")
    return arr


def _pack_words(arr: np.ndarray) -> list[int]:
    n = arr.size
    nwords = (n + WORD - 1) // WORD
    padded = np.zeros(nwords * WORD, dtype=np.uint8)
    padded[:n] = arr
    return np.packbits(padded, bitorder="little").view(np.uint64).tolist()


class BitVec(Encoded):
    """Plain bit vector with a two-level rank directory.

    Positions are 1-based.  ``select`` binary-searches the superblock counts
    and then scans at most eight relative block counts, so no separate select
    samples are stored.
    """

    TAG = 1
    NAME = "bitvec"

    def __init__(self, bits=()):
        arr = _to_bit_array(bits)
        self._setup(_pack_words(arr), int(arr.size))

    @classmethod
    def from_words(cls, words: list[int], length: int) -> BitVec:
        self = cls.__new__(cls)
        self._setup(list(words), length)
        return self

    def _setup(self, words: list[int], length: int, sup=None, blk=None) -> None:
        self.length = length
        self._words = words
        if sup is None:
            counts = np.bitwise_count(np.asarray(words, dtype=np.uint64)).astype(np.int64)
            nsup = (len(words) + SUPER_WORDS - 1) // SUPER_WORDS
            padded = np.zeros(nsup * SUPER_WORDS, dtype=np.int64)
            padded[: len(words)] = counts
            per_sup = padded.reshape(nsup, SUPER_WORDS)
            sup = np.concatenate(([0], np.cumsum(per_sup.sum(axis=1))[:-1])).tolist() if nsup else []
            inner = np.cumsum(per_sup, axis=1) - per_sup
            blk = inner.ravel()[: len(words)].tolist()
        self._sup = sup
        self._blk = blk
        self.ones = self._rank1_raw(length)
        self._sup0 = [k * SUPER_BITS - s for k, s in enumerate(sup)]

    # -- access ---------------------------------------------------------

    def __len__(self) -> int:
        return self.length

    def get(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise IndexOutOfRange(f"bit {i} outside [1, {self.length}]")
        i -= 1
        return (self._words[i >> 6] >> (i & 63)) & 1

    def tolist(self) -> list[int]:
        return [self.get(i) for i in range(1, self.length + 1)]

    def _rank1_raw(self, i: int) -> int:
        if i == 0:
            return 0
        w, r = divmod(i, WORD)
        if w == len(self._words):
            w -= 1
            r = WORD
        res = self._sup[w >> 3] + self._blk[w]
        if r:
            res += (self._words[w] & ((1 << r) - 1)).bit_count()
        return res

    def rank1(self, i: int) -> int:
        """Number of ones among positions 1..i."""
        if not 0 <= i <= self.length:
            raise IndexOutOfRange(f"rank index {i} outside [0, {self.length}]")
        return self._rank1_raw(i)

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def rank(self, b: int, i: int) -> int:
        return self.rank1(i) if b else self.rank0(i)

    def select1(self, k: int) -> int:
        """Position of the k-th one."""
        if not 1 <= k <= self.ones:
            raise SelectOutOfRange(f"select1({k}) with {self.ones} ones")
        sup, blk = self._sup, self._blk
        s = bisect_left(sup, k) - 1
        base = sup[s]
        w = s * SUPER_WORDS
        last = min(w + SUPER_WORDS, len(self._words)) - 1
        while w < last and base + blk[w + 1] < k:
            w += 1
        return w * WORD + _select_in_word(self._words[w], k - base - blk[w]) + 1

    def select0(self, k: int) -> int:
        """Position of the k-th zero."""
        zeros = self.length - self.ones
        if not 1 <= k <= zeros:
            raise SelectOutOfRange(f"select0({k}) with {zeros} zeros")
        sup0, blk = self._sup0, self._blk
        s = bisect_left(sup0, k) - 1
        base = sup0[s]
        w = s * SUPER_WORDS
        last = min(w + SUPER_WORDS, len(self._words)) - 1
        while w < last and base + ((w + 1) % SUPER_WORDS) * WORD - blk[w + 1] < k:
            w += 1
        inner = (w % SUPER_WORDS) * WORD - blk[w]
        return w * WORD + _select_in_word(~self._words[w] & _MASK64, k - base - inner) + 1

    def select(self, b: int, k: int) -> int:
        return self.select1(k) if b else self.select0(k)

    # -- storage --------------------------------------------------------

    def _parts(self):
        return {
            "bits": Raw(self._words, self.length),
            "rank_super": Field(self._sup, bits_for(self.length + 1)),
            "rank_block": Field(self._blk, bits_for(SUPER_BITS)),
        }

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        raw = parts["bits"]
        self._setup(raw.words, raw.nbits, parts["rank_super"].values, parts["rank_block"].values)
        return self

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVec) and self.length == other.length and self._words == other._words

    def __repr__(self) -> str:
        s = "".join(map(str, self.tolist())) if self.length <= 64 else f"<{self.length} bits>"
        return f"BitVec({s})"


class SparseBits(Encoded):
    """Few-ones bit vector stored as its sorted one-positions.

    rank is a binary search over the stored positions, O(log #ones).
    """

    TAG = 2
    NAME = "sparsebits"

    def __init__(self, bits=(), *, length: int | None = None, positions: Sequence[int] | None = None):
        if positions is None:
            arr = _to_bit_array(bits)
            length = int(arr.size)
            positions = (np.flatnonzero(arr) + 1).tolist()
        else:
            positions = list(positions)
            if length is None:
                raise RmqError("length is required with explicit positions")
            if any(b <= a for a, b in zip(positions, positions[1:])) or (
                positions and not 1 <= positions[0] <= positions[-1] <= length
            ):
                raise RmqError("positions must be strictly increasing within [1, length]")
        self.length = length
        self._pos = positions
        self.ones = len(positions)
        # zeros strictly before the t-th one; derived, never stored
        self._zeros_before = [p - t - 1 for t, p in enumerate(positions)]

    def __len__(self) -> int:
        return self.length

    def get(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise IndexOutOfRange(f"bit {i} outside [1, {self.length}]")
        k = bisect_left(self._pos, i)
        return int(k < self.ones and self._pos[k] == i)

    def tolist(self) -> list[int]:
        out = [0] * self.length
        for p in self._pos:
            out[p - 1] = 1
        return out

    def rank1(self, i: int) -> int:
        if not 0 <= i <= self.length:
            raise IndexOutOfRange(f"rank index {i} outside [0, {self.length}]")
        return bisect_right(self._pos, i)

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def rank(self, b: int, i: int) -> int:
        return self.rank1(i) if b else self.rank0(i)

    def select1(self, k: int) -> int:
        if not 1 <= k <= self.ones:
            raise SelectOutOfRange(f"select1({k}) with {self.ones} ones")
        return self._pos[k - 1]

    def select0(self, k: int) -> int:
        if not 1 <= k <= self.length - self.ones:
            raise SelectOutOfRange(f"select0({k}) with {self.length - self.ones} zeros")
        return k + bisect_left(self._zeros_before, k)

    def select(self, b: int, k: int) -> int:
        return self.select1(k) if b else self.select0(k)

    def _header(self):
        return {"length": self.length}

    def _parts(self):
        return {"positions": Field(self._pos, bits_for(self.length + 1))}

    @classmethod
    def _restore(cls, header, parts):
        return cls(length=header["length"], positions=parts["positions"].values)


def make_bits(bits, sparse: bool | None = None):
    """Pick SparseBits when the ones are few (<= log2 n), else a plain BitVec."""
    arr = _to_bit_array(bits)
    if sparse is None:
        sparse = int(arr.sum()) <= max(1, int(arr.size).bit_length() - 1)
    return SparseBits(arr) if sparse else BitVec(arr)


def default_chunk(base: int, word_bits: int = WORD) -> int:
    """Largest t with base**t <= 2**(word_bits - 1), at least 1."""
    t, p = 0, 1
    while p * base <= 1 << (word_bits - 1):
        p *= base
        t += 1
    return max(t, 1)


class PackedArray(Encoded):
    """Symbols of a fixed base packed as one mixed-radix integer per chunk of ``chunk`` symbols.

    The first symbol of a chunk is its most significant digit.  A short final
    chunk is padded with zero digits at the low end.
    """

    TAG = 3
    NAME = "packed"

    def __init__(self, values, base: int, chunk: int | None = None):
        if base < 2:
            raise ValueOutOfBase("base must be >= 2")
        chunk = default_chunk(base) if chunk is None else chunk
        if chunk < 1:
            raise RmqError("chunk must be >= 1")
        vals = np.asarray(values, dtype=np.int64).ravel()
        if vals.size and (vals.min() < 0 or vals.max() >= base):
            raise ValueOutOfBase(f"values must lie in [0, {base - 1}]")
        self.count = int(vals.size)
        self.base = base
        self.chunk = chunk
        nchunks = (self.count + chunk - 1) // chunk
        padded = np.zeros(nchunks * chunk, dtype=np.int64)
        padded[: self.count] = vals
        grid = padded.reshape(nchunks, chunk)
        if base**chunk <= 1 << 63:
            acc = np.zeros(nchunks, dtype=np.uint64)
            for k in range(chunk):
                acc = acc * np.uint64(base) + grid[:, k].astype(np.uint64)
            chunks = acc.tolist()
        else:
            chunks = []
            for row in grid.tolist():
                v = 0
                for d in row:
                    v = v * base + d
                chunks.append(v)
        self._init(chunks)

    def _init(self, chunks: list[int]) -> None:
        self._chunks = chunks
        self._pow = [self.base ** (self.chunk - 1 - k) for k in range(self.chunk)]
        self.chunk_bits = bits_for(self.base**self.chunk)

    def __len__(self) -> int:
        return self.count

    def get(self, i: int) -> int:
        if not 1 <= i <= self.count:
            raise IndexOutOfRange(f"index {i} outside [1, {self.count}]")
        c, k = divmod(i - 1, self.chunk)
        return (self._chunks[c] // self._pow[k]) % self.base

    __getitem__ = get

    def tolist(self) -> list[int]:
        return [self.get(i) for i in range(1, self.count + 1)]

    def _header(self):
        return {"count": self.count, "base": self.base, "chunk": self.chunk}

    def _parts(self):
        return {"chunks": Field(self._chunks, self.chunk_bits)}

    @classmethod
    def _restore(cls, header, parts):
        self = cls.__new__(cls)
        self.count, self.base, self.chunk = header["count"], header["base"], header["chunk"]
        self._init(list(parts["chunks"].values))
        return self


def bv_build(bits) -> BitVec:
    return BitVec(bits)


def bv_rank(v, b: int, i: int) -> int:
    return v.rank(b, i)


def bv_select(v, b: int, k: int) -> int:
    return v.select(b, k)


def packed_build(values, base: int, chunk: int | None = None) -> PackedArray:
    return PackedArray(values, base, chunk)


def packed_get(p: PackedArray, i: int) -> int:
    return p.get(i)
