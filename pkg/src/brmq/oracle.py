"""Brute-force ground truth: range scans, full answer tables, distinguishability."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .core import (
    ROW_MAJOR,
    Candidate,
    DimensionMismatch,
    ExplosionGuard,
    Policy,
    Pos2D,
    QueryClass,
    Rect,
    policy_min,
)

DEFAULT_MAX_CELLS = 64


def _grid(a) -> np.ndarray:
    cells = getattr(a, "cells", a)
    g = np.asarray(cells)
    return g.reshape(1, -1) if g.ndim == 1 else g


def oracle_rmq(a, rect: Rect, policy=ROW_MAJOR) -> Pos2D:
    policy = Policy.parse(policy)
    g = _grid(a)
    rect.check(*g.shape)
    sub = g[rect.r1 - 1 : rect.r2, rect.c1 - 1 : rect.c2]
    if policy is ROW_MAJOR:
        r, c = divmod(int(sub.argmin()), sub.shape[1])
    else:
        c, r = divmod(int(sub.T.argmin()), sub.shape[0])
    return Pos2D(rect.r1 + r, rect.c1 + c)


def oracle_rmq_flat(a, rect: Rect, policy=ROW_MAJOR) -> Pos2D:
    """Second, independent oracle: materialize every cell as a Candidate."""
    policy = Policy.parse(policy)
    g = _grid(a)
    rect.check(*g.shape)
    cands = [Candidate(int(g[r - 1, c - 1]), Pos2D(r, c)) for r, c in rect.cells()]
    return policy_min(cands, policy).pos


def queries_of(qclass, m: int, n: int) -> Iterator[Rect]:
    """Every valid query of a class, in canonical order."""
    q = QueryClass.parse(qclass)
    spans = [(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]
    if q is QueryClass.ONE_SIDED:
        for j in range(1, n + 1):
            yield Rect(1, m, 1, j, q)
    elif q is QueryClass.TWO_SIDED:
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                yield Rect(1, i, 1, j, q)
    elif q is QueryClass.COL_SPAN:
        for a, b in spans:
            yield Rect(1, m, a, b, q)
    elif q is QueryClass.THREE_SIDED:
        for i in range(1, m + 1):
            for a, b in spans:
                yield Rect(1, i, a, b, q)
    else:
        for r1 in range(1, m + 1):
            for r2 in range(r1, m + 1):
                for a, b in spans:
                    yield Rect(r1, r2, a, b, q)


def table_size(qclass, m: int, n: int) -> int:
    q = QueryClass.parse(qclass)
    spans = n * (n + 1) // 2
    return {
        QueryClass.ONE_SIDED: n,
        QueryClass.TWO_SIDED: m * n,
        QueryClass.COL_SPAN: spans,
        QueryClass.THREE_SIDED: m * spans,
        QueryClass.FOUR_SIDED: m * (m + 1) // 2 * spans,
    }[q]


@dataclass(frozen=True)
class AnswerTable:
    qclass: QueryClass
    policy: Policy
    m: int
    n: int
    answers: tuple[tuple[int, int], ...]  # aligned with queries_of(qclass, m, n)

    def items(self) -> Iterator[tuple[Rect, Pos2D]]:
        for rect, ans in zip(queries_of(self.qclass, self.m, self.n), self.answers):
            yield rect, Pos2D(*ans)

    def __len__(self) -> int:
        return len(self.answers)


def _span_answers(keys: list, n: int) -> list[int]:
    # for each (a, b) in canonical order, the index of the smallest key in keys[a-1:b]
    out = []
    for a in range(n):
        best = a
        for b in range(a, n):
            if keys[b] < keys[best]:
                best = b
            out.append(best)
    return out


def answer_table(a, qclass, policy=ROW_MAJOR, max_cells: int | None = DEFAULT_MAX_CELLS) -> AnswerTable:
    """All answers of a query class, computed incrementally rather than by rescanning."""
    q = QueryClass.parse(qclass)
    policy = Policy.parse(policy)
    g = _grid(a)
    m, n = g.shape
    if q in (QueryClass.THREE_SIDED, QueryClass.FOUR_SIDED) and max_cells is not None and m * n > max_cells:
        raise ExplosionGuard(f"{q.value} table for {m}x{n} exceeds max_cells={max_cells}")
    vals = g.tolist()

    def key(r, c):
        return (vals[r][c], policy.key(r, c))

    def col_best(r1: int, r2: int) -> list[tuple]:
        # per column: smallest key over rows r1..r2 (0-based, inclusive)
        out = []
        for c in range(n):
            out.append(min(key(r, c) for r in range(r1, r2 + 1)))
        return out

    def to_pos(k) -> tuple[int, int]:
        r, c = k[1] if policy is ROW_MAJOR else k[1][::-1]
        return (r + 1, c + 1)

    answers: list[tuple[int, int]] = []
    if q is QueryClass.ONE_SIDED:
        best = None
        for k in col_best(0, m - 1):
            best = k if best is None or k < best else best
            answers.append(to_pos(best))
    elif q is QueryClass.TWO_SIDED:
        prev = [None] * n
        for i in range(m):
            row_best = None
            for j in range(n):
                cands = [key(i, j)]
                if prev[j] is not None:
                    cands.append(prev[j])
                if row_best is not None:
                    cands.append(row_best)
                row_best = min(cands)
                prev[j] = row_best
                answers.append(to_pos(row_best))
    else:
        if q is QueryClass.COL_SPAN:
            row_pairs = [(0, m - 1)]
        elif q is QueryClass.THREE_SIDED:
            row_pairs = [(0, i) for i in range(m)]
        else:
            row_pairs = [(r1, r2) for r1 in range(m) for r2 in range(r1, m)]
        cache: dict[int, list] = {}
        for r1, r2 in row_pairs:
            if r1 in cache:
                cur = [min(x, key(r2, c)) for c, x in enumerate(cache[r1])]
            else:
                cur = col_best(r1, r2)
            cache[r1] = cur
            answers.extend(to_pos(cur[b]) for b in _span_answers(cur, n))
    return AnswerTable(q, policy, m, n, tuple(answers))


def distinct_tables(arrays: Iterable, qclass, policy=ROW_MAJOR, max_cells: int | None = DEFAULT_MAX_CELLS) -> int:
    """Exact number of pairwise-distinct answer tables (set semantics on full content)."""
    seen: set[tuple] = set()
    shape = None
    for a in arrays:
        g = _grid(a)
        if shape is None:
            shape = g.shape
        elif g.shape != shape:
            raise DimensionMismatch(f"array of shape {g.shape} among arrays of shape {shape}")
        seen.add(answer_table(g, qclass, policy, max_cells).answers)
    return len(seen)
