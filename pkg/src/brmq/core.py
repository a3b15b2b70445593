"""Shared domain types: arrays, positions, query rectangles and tie-breaking."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class RmqError(ValueError):
    """Base class for all input and contract errors raised by this package."""


class MalformedHeader(RmqError):
    pass


class CellOutOfAlphabet(RmqError):
    pass


class DimensionMismatch(RmqError):
    pass


class EmptyCandidateList(RmqError):
    pass


class MalformedLine(RmqError):
    pass


class RangeInverted(RmqError):
    pass


class ClassViolation(RmqError):
    pass


class IndexOutOfRange(RmqError, IndexError):
    pass


class UnsupportedPolicy(RmqError):
    pass


class AlphabetViolation(RmqError):
    pass


class ExplosionGuard(RmqError):
    pass


class Policy(enum.Enum):
    ROW_MAJOR = "row_major"  # topmost, then leftmost
    COL_MAJOR = "col_major"  # leftmost, then topmost

    def key(self, row: int, col: int) -> tuple[int, int]:
        return (row, col) if self is Policy.ROW_MAJOR else (col, row)

    @classmethod
    def parse(cls, text: str | Policy) -> Policy:
        if isinstance(text, Policy):
            return text
        try:
            return cls(text.lower().replace("-", "_"))
        except ValueError:
            raise UnsupportedPolicy(f"unknown policy {text!r}") from None


ROW_MAJOR = Policy.ROW_MAJOR
COL_MAJOR = Policy.COL_MAJOR


class QueryClass(enum.Enum):
    ONE_SIDED = "one_sided"
    TWO_SIDED = "two_sided"
    THREE_SIDED = "three_sided"
    COL_SPAN = "col_span"
    FOUR_SIDED = "four_sided"

    @classmethod
    def parse(cls, text: str | QueryClass) -> QueryClass:
        if isinstance(text, QueryClass):
            return text
        return cls(text.lower().replace("-", "_"))


class Pos2D(tuple):
    """A 1-based (row, col) pair. Plain tuple so it compares and hashes cheaply."""

    __slots__ = ()

    def __new__(cls, row: int, col: int):
        return tuple.__new__(cls, (row, col))

    @property
    def row(self) -> int:
        return self[0]

    @property
    def col(self) -> int:
        return self[1]

    def __repr__(self) -> str:
        return f"({self[0]},{self[1]})"


@dataclass(frozen=True)
class Rect:
    r1: int
    r2: int
    c1: int
    c2: int
    qclass: QueryClass = QueryClass.FOUR_SIDED

    def check(self, m: int, n: int) -> Rect:
        if self.r1 > self.r2 or self.c1 > self.c2:
            raise RangeInverted(f"inverted range {self}")
        if self.r1 < 1 or self.c1 < 1 or self.r2 > m or self.c2 > n:
            raise IndexOutOfRange(f"{self} outside {m}x{n}")
        q = self.qclass
        ok = True
        if q is QueryClass.ONE_SIDED:
            ok = self.r1 == 1 and self.c1 == 1 and self.r2 == m
        elif q is QueryClass.TWO_SIDED:
            ok = self.r1 == 1 and self.c1 == 1
        elif q is QueryClass.THREE_SIDED:
            ok = self.r1 == 1
        elif q is QueryClass.COL_SPAN:
            ok = self.r1 == 1 and self.r2 == m
        if not ok:
            raise ClassViolation(f"{self} violates {q.value}")
        return self

    def cells(self) -> Iterable[tuple[int, int]]:
        for r in range(self.r1, self.r2 + 1):
            for c in range(self.c1, self.c2 + 1):
                yield r, c


@dataclass(frozen=True)
class Candidate:
    value: int
    pos: Pos2D


def policy_min(cands: Sequence[Candidate], policy: Policy) -> Candidate:
    if not cands:
        raise EmptyCandidateList("policy_min of an empty list")
    return min(cands, key=lambda c: (c.value, policy.key(c.pos[0], c.pos[1])))


class Array2D:
    """Immutable m x n grid over the alphabet {0..sigma-1}, 1-based at the API surface.

    ``cells`` is a read-only numpy array; 1D arrays are the m == 1 case.
    """

    __slots__ = ("cells", "sigma")

    def __init__(self, cells, sigma: int | None = None):
        a = np.asarray(cells)
        if a.dtype.kind not in "iu":
            a = np.asarray(cells, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionMismatch(f"array must be 2D and nonempty, got shape {a.shape}")
        if sigma is None:
            sigma = int(a.max()) + 1
        if sigma < 1:
            raise CellOutOfAlphabet("sigma must be >= 1")
        if a.min() < 0 or a.max() >= sigma:
            raise CellOutOfAlphabet(f"cell values must lie in [0, {sigma - 1}]")
        a = a.astype(_narrow_dtype(sigma), copy=True)
        a.flags.writeable = False
        self.cells = a
        self.sigma = int(sigma)

    @property
    def m(self) -> int:
        return self.cells.shape[0]

    @property
    def n(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def at(self, i: int, j: int) -> int:
        return int(self.cells[i - 1, j - 1])

    def row(self, i: int) -> list[int]:
        return self.cells[i - 1].tolist()

    def transpose(self) -> Array2D:
        return Array2D(self.cells.T, self.sigma)

    def tolist(self) -> list[list[int]]:
        return self.cells.tolist()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Array2D)
            and self.sigma == other.sigma
            and self.shape == other.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    def __hash__(self) -> int:
        return hash((self.sigma, self.shape, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"Array2D({self.tolist()}, sigma={self.sigma})"


def _narrow_dtype(sigma: int):
    if sigma <= 1 << 8:
        return np.uint8
    if sigma <= 1 << 16:
        return np.uint16
    if sigma <= 1 << 32:
        return np.uint32
    return np.int64


def as_array(a, sigma: int | None = None) -> Array2D:
    return a if isinstance(a, Array2D) else Array2D(a, sigma)


def bits_for(k: int) -> int:
    """Bits needed to store one of ``k`` distinct values (ceil(log2 k); 0 when k <= 1)."""
    return max(k - 1, 0).bit_length()


# ---------------------------------------------------------------------------
# text formats


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_array(text: str) -> Array2D:
    lines = _content_lines(text)
    if not lines:
        raise MalformedHeader("missing 'm n sigma' header")
    head = lines[0].split()
    try:
        m, n, sigma = (int(x) for x in head)
    except ValueError:
        raise MalformedHeader(f"bad header {lines[0]!r}") from None
    if m < 1 or n < 1 or sigma < 1:
        raise MalformedHeader(f"header values must be positive: {lines[0]!r}")
    rows = lines[1:]
    if len(rows) != m:
        raise DimensionMismatch(f"expected {m} rows, found {len(rows)}")
    cells = []
    for k, ln in enumerate(rows, 1):
        try:
            vals = [int(x) for x in ln.split()]
        except ValueError:
            raise DimensionMismatch(f"row {k} is not integers: {ln!r}") from None
        if len(vals) != n:
            raise DimensionMismatch(f"row {k} has {len(vals)} cells, expected {n}")
        for v in vals:
            if v < 0 or v >= sigma:
                raise CellOutOfAlphabet(f"row {k}: value {v} outside [0, {sigma - 1}]")
        cells.append(vals)
    return Array2D(cells, sigma)


def emit_array(a: Array2D, comments: Sequence[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    out.append(f"{a.m} {a.n} {a.sigma}")
    out.extend(" ".join(str(v) for v in row) for row in a.cells.tolist())
    return "\n".join(out) + "\n"


_QUERY_ARITY = {
    QueryClass.FOUR_SIDED: 4,
    QueryClass.THREE_SIDED: 3,
    QueryClass.TWO_SIDED: 2,
    QueryClass.COL_SPAN: 2,
    QueryClass.ONE_SIDED: 1,
}


def make_rect(vals: Sequence[int], qclass: QueryClass, m: int) -> Rect:
    """Build a Rect from the per-class index tuple used in query files."""
    if qclass is QueryClass.FOUR_SIDED:
        r1, r2, c1, c2 = vals
    elif qclass is QueryClass.THREE_SIDED:
        r1, (r2, c1, c2) = 1, vals
    elif qclass is QueryClass.TWO_SIDED:
        r1, c1, (r2, c2) = 1, 1, vals
    elif qclass is QueryClass.COL_SPAN:
        r1, r2, (c1, c2) = 1, m, vals
    else:
        r1, r2, c1, (c2,) = 1, m, 1, vals
    if r1 > r2 or c1 > c2:
        raise RangeInverted(f"inverted range in {' '.join(map(str, vals))}")
    return Rect(r1, r2, c1, c2, qclass)


def rect_fields(rect: Rect) -> tuple[int, ...]:
    q = rect.qclass
    if q is QueryClass.FOUR_SIDED:
        return (rect.r1, rect.r2, rect.c1, rect.c2)
    if q is QueryClass.THREE_SIDED:
        return (rect.r2, rect.c1, rect.c2)
    if q is QueryClass.TWO_SIDED:
        return (rect.r2, rect.c2)
    if q is QueryClass.COL_SPAN:
        return (rect.c1, rect.c2)
    return (rect.c2,)


def parse_queries(text: str, qclass: QueryClass | str, m: int | None = None) -> list[Rect]:
    qclass = QueryClass.parse(qclass)
    if m is None:
        if qclass in (QueryClass.ONE_SIDED, QueryClass.COL_SPAN):
            raise ClassViolation(f"{qclass.value} queries need the row count m")
        m = 0
    arity = _QUERY_ARITY[qclass]
    out = []
    for k, ln in enumerate(_content_lines(text), 1):
        parts = ln.split()
        try:
            vals = [int(x) for x in parts]
        except ValueError:
            raise MalformedLine(f"line {k}: {ln!r}") from None
        if len(vals) != arity:
            raise MalformedLine(f"line {k}: expected {arity} integers for {qclass.value}, got {len(vals)}")
        if any(v < 1 for v in vals):
            raise MalformedLine(f"line {k}: indices are 1-based")
        out.append(make_rect(vals, qclass, m))
    return out


def emit_queries(rects: Iterable[Rect]) -> str:
    return "".join(" ".join(map(str, rect_fields(r))) + "\n" for r in rects)


def emit_answers(answers: Iterable[tuple[int, int]]) -> str:
    return "".join(f"{r} {c}\n" for r, c in answers)


def parse_answers(text: str) -> list[Pos2D]:
    out = []
    for ln in _content_lines(text):
        r, c = ln.split()
        out.append(Pos2D(int(r), int(c)))
    return out
