"""Slow reference implementations written from the definitions, sharing no code with brmq."""
from __future__ import annotations

import itertools
from functools import lru_cache


def scan_rmq(vals, i: int, j: int) -> int:
    """Leftmost minimum position in vals[i..j], 1-based."""
    best = i
    for k in range(i + 1, j + 1):
        if vals[k - 1] < vals[best - 1]:
            best = k
    return best


def scan_rmq2d(grid, r1: int, r2: int, c1: int, c2: int, col_major: bool = False) -> tuple[int, int]:
    """Minimum of a rectangle with the tie order spelled out as nested loops."""
    best = None
    if col_major:
        order = [(r, c) for c in range(c1, c2 + 1) for r in range(r1, r2 + 1)]
    else:
        order = [(r, c) for r in range(r1, r2 + 1) for c in range(c1, c2 + 1)]
    for r, c in order:
        if best is None or grid[r - 1][c - 1] < grid[best[0] - 1][best[1] - 1]:
            best = (r, c)
    return best


def prefix_min_positions(vals) -> list[int]:
    return [scan_rmq(vals, 1, j) for j in range(1, len(vals) + 1)]


# Trees as nested tuples: None is empty, (left, right) is a node.


@lru_cache(maxsize=None)
def all_trees(n: int) -> tuple:
    if n == 0:
        return (None,)
    out = []
    for k in range(n):
        for lt in all_trees(k):
            for rt in all_trees(n - 1 - k):
                out.append((lt, rt))
    return tuple(out)


@lru_cache(maxsize=None)
def bounded_trees(n: int, k: int) -> tuple:
    """Trees of n nodes with at most k left edges on any root-to-leaf path."""
    if n == 0:
        return (None,)
    out = []
    for size in range(n):
        if size and k == 0:
            continue
        for lt in bounded_trees(size, k - 1 if size else 0):
            for rt in bounded_trees(n - 1 - size, k):
                out.append((lt, rt))
    return tuple(out)


def tree_left_height(t) -> int:
    if t is None:
        return 0
    lt, rt = t
    return max(1 + tree_left_height(lt) if lt is not None else 0, tree_left_height(rt))


def tree_of(vals):
    """Cartesian tree by recursion on the leftmost minimum."""
    if not vals:
        return None
    p = vals.index(min(vals))
    return (tree_of(vals[:p]), tree_of(vals[p + 1 :]))


def ck_literal(grid, k: int) -> list[int]:
    """Column summary: row r when A[r][j] = k and everything above exceeds k;
    0 when k occurs in the column but never in that position; m+1 when absent."""
    m = len(grid)
    out = []
    for j in range(len(grid[0])):
        col = [grid[r][j] for r in range(m)]
        if k not in col:
            out.append(m + 1)
            continue
        hit = 0
        for r in range(m):
            if col[r] == k and all(col[q] > k for q in range(r)):
                hit = r + 1
                break
        out.append(hit)
    return out


def all_grids(m: int, n: int, sigma: int):
    for cells in itertools.product(range(sigma), repeat=m * n):
        yield [list(cells[r * n : (r + 1) * n]) for r in range(m)]


def catalan(n: int) -> int:
    c = 1
    for i in range(n):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c
