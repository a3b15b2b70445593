"""Uniform build/answer adapters over every encoding, keyed by name.

1D structures are exposed over 1 x n arrays: range queries are column-spanning
queries there, and prefix queries are 1-sided.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .core import COL_MAJOR, ROW_MAJOR, Array2D, Policy, Pos2D, QueryClass, Rect, RmqError, UnsupportedPolicy
from .rmq1d import BinaryRmq, OneSided1D, Rmq1DBounded, Rmq1DGeneral
from .rmq2d import ColSpan2D, FourSidedBlocked, OneSided2D, ThreeSidedCk, TwoSidedGeneral, TwoSidedStaircase

BOTH = (ROW_MAJOR, COL_MAJOR)


class NotApplicable(RmqError):
    """The encoding cannot be built over this array (shape or alphabet)."""


@dataclass(frozen=True)
class EncodingInfo:
    name: str
    qclass: QueryClass
    policies: tuple[Policy, ...]
    native: Policy
    one_dim: bool
    max_sigma: int | None
    _build: Callable[[Array2D, Policy], Any]

    def applicable(self, a: Array2D) -> bool:
        if self.one_dim and a.m != 1:
            return False
        return self.max_sigma is None or a.sigma <= self.max_sigma

    def build(self, a: Array2D, policy: Policy | str | None = None):
        policy = self.native if policy is None else Policy.parse(policy)
        if policy not in self.policies:
            names = ", ".join(p.value for p in self.policies)
            raise UnsupportedPolicy(f"{self.name} supports {names}, not {policy.value}")
        if not self.applicable(a):
            needs = []
            if self.one_dim:
                needs.append("a single row (m == 1)")
            if self.max_sigma is not None:
                needs.append(f"sigma <= {self.max_sigma}")
            raise NotApplicable(f"{self.name} needs {' and '.join(needs)}")
        return self._build(a, policy)


def answer(structure, rect: Rect) -> Pos2D:
    """Answer a Rect of the structure's class, 1D structures included."""
    if isinstance(structure, OneSided1D):
        return Pos2D(1, structure.query(rect.c2))
    if isinstance(structure, (Rmq1DGeneral, Rmq1DBounded, BinaryRmq)):
        return Pos2D(1, structure.query(rect.c1, rect.c2))
    return structure.query_rect(rect)


def qclass_of(structure) -> QueryClass:
    if isinstance(structure, OneSided1D):
        return QueryClass.ONE_SIDED
    if isinstance(structure, (Rmq1DGeneral, Rmq1DBounded, BinaryRmq)):
        return QueryClass.COL_SPAN
    return structure.QCLASS


def policy_of(structure) -> Policy:
    return getattr(structure, "policy", ROW_MAJOR)


def shape_of(structure) -> tuple[int, int]:
    if hasattr(structure, "m"):
        return structure.m, structure.n
    return 1, structure.n


ENCODINGS: dict[str, EncodingInfo] = {
    e.name: e
    for e in [
        EncodingInfo("rmq1d_general", QueryClass.COL_SPAN, BOTH, ROW_MAJOR, True, None,
                     lambda a, p: Rmq1DGeneral(a)),
        EncodingInfo("rmq1d_bounded", QueryClass.COL_SPAN, BOTH, ROW_MAJOR, True, None,
                     lambda a, p: Rmq1DBounded(a, a.sigma)),
        EncodingInfo("onesided1d", QueryClass.ONE_SIDED, BOTH, ROW_MAJOR, True, None,
                     lambda a, p: OneSided1D(a)),
        EncodingInfo("binary_rmq", QueryClass.COL_SPAN, BOTH, ROW_MAJOR, True, 2,
                     lambda a, p: BinaryRmq(a)),
        EncodingInfo("onesided2d", QueryClass.ONE_SIDED, BOTH, ROW_MAJOR, False, None, OneSided2D),
        EncodingInfo("twosided_general", QueryClass.TWO_SIDED, (COL_MAJOR,), COL_MAJOR, False, None, TwoSidedGeneral),
        EncodingInfo("twosided_staircase", QueryClass.TWO_SIDED, BOTH, ROW_MAJOR, False, None, TwoSidedStaircase),
        EncodingInfo("threesided", QueryClass.THREE_SIDED, (ROW_MAJOR,), ROW_MAJOR, False, None, ThreeSidedCk),
        EncodingInfo("colspan", QueryClass.COL_SPAN, (COL_MAJOR,), COL_MAJOR, False, None, ColSpan2D),
        EncodingInfo("foursided", QueryClass.FOUR_SIDED, BOTH, ROW_MAJOR, False, None, FourSidedBlocked),
    ]
}


def get(name: str) -> EncodingInfo:
    try:
        return ENCODINGS[name]
    except KeyError:
        raise RmqError(f"unknown encoding {name!r}; choose from {', '.join(ENCODINGS)}") from None
