"""Differential checking of encodings against the brute-force oracle."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .codec import deserialize, serialize
from .core import Array2D, Policy, Pos2D, QueryClass, Rect
from .encodings import EncodingInfo, answer
from .oracle import answer_table, oracle_rmq, queries_of


@dataclass
class CheckResult:
    encoding: str
    policy: str
    arrays: int = 0
    queries: int = 0
    mismatches: int = 0
    examples: list = field(default_factory=list)

    def merge(self, other: CheckResult) -> None:
        self.arrays += other.arrays
        self.queries += other.queries
        self.mismatches += other.mismatches
        self.examples.extend(other.examples[: max(0, 5 - len(self.examples))])

    def summary(self) -> str:
        return (f"{self.encoding} policy={self.policy} arrays={self.arrays} "
                f"queries={self.queries} mismatches={self.mismatches}")


def all_arrays(m: int, n: int, sigma: int):
    for cells in itertools.product(range(sigma), repeat=m * n):
        yield Array2D(np.array(cells, dtype=np.int64).reshape(m, n), sigma)


def random_array(rng: random.Random, m: int, n: int, sigma: int) -> Array2D:
    return Array2D([[rng.randrange(sigma) for _ in range(n)] for _ in range(m)], sigma)


def random_rect(rng: random.Random, qclass: QueryClass, m: int, n: int) -> Rect:
    r1, r2 = sorted((rng.randint(1, m), rng.randint(1, m)))
    c1, c2 = sorted((rng.randint(1, n), rng.randint(1, n)))
    if qclass is QueryClass.ONE_SIDED:
        return Rect(1, m, 1, c2, qclass)
    if qclass is QueryClass.TWO_SIDED:
        return Rect(1, r2, 1, c2, qclass)
    if qclass is QueryClass.THREE_SIDED:
        return Rect(1, r2, c1, c2, qclass)
    if qclass is QueryClass.COL_SPAN:
        return Rect(1, m, c1, c2, qclass)
    return Rect(r1, r2, c1, c2, qclass)


def _maybe_reload(s, roundtrip: bool):
    return deserialize(serialize(s)[0]) if roundtrip else s


def check_array_exhaustive(info: EncodingInfo, a: Array2D, policy: Policy, roundtrip: bool = False) -> CheckResult:
    """Every query of the class on one array, against the oracle's full answer table."""
    res = CheckResult(info.name, policy.value, arrays=1)
    s = _maybe_reload(info.build(a, policy), roundtrip)
    table = answer_table(a, info.qclass, policy, max_cells=None)
    for rect, want in table.items():
        got = answer(s, rect)
        res.queries += 1
        if tuple(got) != tuple(want):
            res.mismatches += 1
            if len(res.examples) < 5:
                res.examples.append((a.tolist(), rect, tuple(got), tuple(want)))
    return res


def check_exhaustive(info: EncodingInfo, policy: Policy, m: int, n: int, sigma: int, roundtrip: bool = False) -> CheckResult:
    res = CheckResult(info.name, policy.value)
    for a in all_arrays(m, n, sigma):
        if info.applicable(a):
            res.merge(check_array_exhaustive(info, a, policy, roundtrip))
    return res


def check_random(
    info: EncodingInfo,
    policy: Policy,
    a: Array2D,
    queries: int,
    rng: random.Random,
    roundtrip: bool = False,
) -> CheckResult:
    res = CheckResult(info.name, policy.value, arrays=1)
    s = _maybe_reload(info.build(a, policy), roundtrip)
    for _ in range(queries):
        rect = random_rect(rng, info.qclass, a.m, a.n)
        got = answer(s, rect)
        want = oracle_rmq(a, rect, policy)
        res.queries += 1
        if tuple(got) != tuple(want):
            res.mismatches += 1
            if len(res.examples) < 5:
                res.examples.append((a.tolist(), rect, tuple(got), tuple(want)))
    return res


def answers_for(structure, rects) -> list[Pos2D]:
    return [answer(structure, r) for r in rects]


__all__ = [
    "CheckResult",
    "all_arrays",
    "random_array",
    "random_rect",
    "check_array_exhaustive",
    "check_exhaustive",
    "check_random",
    "answers_for",
    "queries_of",
]
