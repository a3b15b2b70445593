"""Encoding data structures for range minimum queries over bounded alphabets."""
from .core import (
    COL_MAJOR,
    ROW_MAJOR,
    Array2D,
    Candidate,
    Policy,
    Pos2D,
    QueryClass,
    Rect,
    RmqError,
    policy_min,
)
from .codec import deserialize, serialize
from .encodings import ENCODINGS, answer
from .oracle import answer_table, distinct_tables, oracle_rmq
from .rmq1d import BinaryRmq, OneSided1D, Rmq1DBounded, Rmq1DGeneral, cartesian_tree, left_height
from .rmq2d import ColSpan2D, FourSidedBlocked, OneSided2D, ThreeSidedCk, TwoSidedGeneral, TwoSidedStaircase
from .spacemeter import emit_report, measure
from .treecount import count_trees

__all__ = [
    "COL_MAJOR", "ROW_MAJOR", "Array2D", "Candidate", "Policy", "Pos2D", "QueryClass", "Rect", "RmqError",
    "policy_min", "serialize", "deserialize", "ENCODINGS", "answer", "answer_table", "distinct_tables",
    "oracle_rmq", "BinaryRmq", "OneSided1D", "Rmq1DBounded", "Rmq1DGeneral", "cartesian_tree", "left_height",
    "ColSpan2D", "FourSidedBlocked", "OneSided2D", "ThreeSidedCk", "TwoSidedGeneral", "TwoSidedStaircase",
    "emit_report", "measure", "count_trees",
]
