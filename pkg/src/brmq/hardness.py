"""Lower-bound instance families and the tree-counting side of the 1D bound."""
from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .core import COL_MAJOR, ROW_MAJOR, Array2D, DimensionMismatch, ExplosionGuard, Policy, QueryClass, RmqError
from .rmq1d import cartesian_tree
from .treecount import catalan, count_trees  # noqa: F401  (re-exported)


class InfeasibleParams(RmqError):
    pass


class Kind(enum.Enum):
    ONE_SIDED_GEN = "one_sided_gen"
    ONE_SIDED_BOUNDED = "one_sided_bounded"
    TWO_SIDED_ROWS = "two_sided_rows"
    TWO_SIDED_PARALLELOGRAM = "two_sided_parallelogram"
    THREE_SIDED_COLS = "three_sided_cols"
    COLSPAN_BINARY = "colspan_binary"
    COLSPAN_GENERAL = "colspan_general"
    FOUR_SIDED_BLOCKS = "four_sided_blocks"

    @classmethod
    def parse(cls, text) -> Kind:
        if isinstance(text, Kind):
            return text
        return cls(text.lower().replace("-", "_"))


QUERY_CLASS = {
    Kind.ONE_SIDED_GEN: QueryClass.ONE_SIDED,
    Kind.ONE_SIDED_BOUNDED: QueryClass.ONE_SIDED,
    Kind.TWO_SIDED_ROWS: QueryClass.TWO_SIDED,
    Kind.TWO_SIDED_PARALLELOGRAM: QueryClass.TWO_SIDED,
    Kind.THREE_SIDED_COLS: QueryClass.THREE_SIDED,
    Kind.COLSPAN_BINARY: QueryClass.COL_SPAN,
    Kind.COLSPAN_GENERAL: QueryClass.COL_SPAN,
    Kind.FOUR_SIDED_BLOCKS: QueryClass.FOUR_SIDED,
}

# column-spanning families rely on leftmost-column tie-breaking
FAMILY_POLICY: dict[Kind, Policy] = {k: COL_MAJOR if QUERY_CLASS[k] is QueryClass.COL_SPAN else ROW_MAJOR for k in Kind}


class WideArray:
    """Grid of signed integers with no alphabet bound (ladder constructions)."""

    __slots__ = ("cells",)

    def __init__(self, cells):
        a = np.asarray(cells, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2 or 0 in a.shape:
            raise DimensionMismatch(f"array must be 2D and nonempty, got shape {a.shape}")
        a.flags.writeable = False
        self.cells = a

    m = property(lambda self: self.cells.shape[0])
    n = property(lambda self: self.cells.shape[1])
    shape = property(lambda self: self.cells.shape)

    def at(self, i: int, j: int) -> int:
        return int(self.cells[i - 1, j - 1])

    def tolist(self) -> list[list[int]]:
        return self.cells.tolist()

    def to_alphabet(self) -> Array2D:
        """Shift to a non-negative range; answers are unchanged by the shift."""
        lo = int(self.cells.min())
        return Array2D(self.cells - lo, int(self.cells.max()) - lo + 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, WideArray) and np.array_equal(self.cells, other.cells)

    def __hash__(self) -> int:
        return hash((self.shape, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"WideArray({self.tolist()})"


@dataclass(frozen=True)
class FamilyParams:
    """One member of a family: the kind, its dimensions and its free choice.

    ``choice`` is kind-specific (see ``CHOICE_DOC``); when it is None the
    member is drawn from ``seed``.  ``options`` holds layout switches.
    """

    kind: Kind
    m: int
    n: int
    sigma: int = 2
    choice: tuple | None = None
    seed: int = 0
    options: tuple[tuple[str, str], ...] = field(default=())

    def option(self, name: str, default: str) -> str:
        return dict(self.options).get(name, default)


CHOICE_DOC = {
    Kind.ONE_SIDED_GEN: "rows: the row (1..m) holding the marked value of each column",
    Kind.ONE_SIDED_BOUNDED: "(cols, rows): strictly decreasing columns j_0 > ... and the row of value k in column j_k",
    Kind.TWO_SIDED_ROWS: "steps: per row, n-1 bits (1 = step down by one)",
    Kind.TWO_SIDED_PARALLELOGRAM: "offsets: per level and row, an offset 0..3 inside the band or -1 for none",
    Kind.THREE_SIDED_COLS: "columns: per column, rows i_0 > i_1 > ... > 1 of values 0, 1, ...",
    Kind.COLSPAN_BINARY: "rows: per column, 1 for no zero or the row 2..m of its zero",
    Kind.COLSPAN_GENERAL: "(w, rows): column minima over {0..sigma-2} and the row holding each",
    Kind.FOUR_SIDED_BLOCKS: "perms: per block, one flag per full anti-diagonal (1 = reversed)",
}


# ---------------------------------------------------------------------------
# feasibility and choice spaces


def _require(ok: bool, what: str) -> None:
    if not ok:
        raise InfeasibleParams(what)


def _band_shift(p: FamilyParams, r: int) -> int:
    span = p.n - 4 * p.sigma
    return 0 if p.m == 1 else round((p.m - r) * span / (p.m - 1))


def check_params(p: FamilyParams) -> None:
    _require(p.m >= 1 and p.n >= 1, "m >= 1 and n >= 1")
    k = p.kind
    if k is Kind.ONE_SIDED_BOUNDED:
        _require(2 <= p.sigma <= p.n + 1, "2 <= sigma <= n + 1")
    elif k is Kind.THREE_SIDED_COLS:
        _require(2 <= p.sigma <= p.m, "2 <= sigma <= m")
    elif k is Kind.COLSPAN_BINARY:
        _require(p.sigma == 2, "sigma == 2")
    elif k is Kind.COLSPAN_GENERAL:
        _require(2 < p.sigma <= p.m, "2 < sigma <= m")
    elif k is Kind.TWO_SIDED_PARALLELOGRAM:
        _require(2 <= p.sigma < p.n / 4 - 4, "2 <= sigma < n/4 - 4")
        for r in range(1, p.m):
            _require(_band_shift(p, r) - _band_shift(p, r + 1) >= 4, "rows too dense: need (n - 4 sigma)/(m - 1) >= 4")
    elif k is Kind.FOUR_SIDED_BLOCKS:
        root = math.isqrt(p.sigma)
        _require(root * root == p.sigma and root % 2 == 0, "sigma a perfect square with even root")
        _require(root <= min(p.m, p.n // 2), "sqrt(sigma) <= min(m, n/2)")


def _blocks(p: FamilyParams) -> tuple[int, int, int]:
    root = math.isqrt(p.sigma)
    return root, p.m // root, p.n // (2 * root)


def _full_diagonals(root: int) -> int:
    h, w = root // 2, root
    return w - h + 1


def choice_space(p: FamilyParams) -> list[list]:
    """Per-coordinate option lists whose product is the family (for kinds where it is a product)."""
    k, m, n, s = p.kind, p.m, p.n, p.sigma
    if k is Kind.ONE_SIDED_GEN:
        return [list(range(1, m + 1))] * n
    if k is Kind.TWO_SIDED_ROWS:
        return [[0, 1]] * (m * (n - 1))
    if k is Kind.TWO_SIDED_PARALLELOGRAM:
        return [[-1, 0, 1, 2, 3]] * (m * (s - 1))
    if k is Kind.THREE_SIDED_COLS:
        opts = [tuple(sorted(c, reverse=True)) for c in itertools.combinations(range(2, m + 1), s - 1)]
        return [opts] * n
    if k is Kind.COLSPAN_BINARY:
        return [list(range(1, m + 1))] * n
    if k is Kind.FOUR_SIDED_BLOCKS:
        root, bm, bn = _blocks(p)
        return [[0, 1]] * (bm * bn * _full_diagonals(root))
    raise InfeasibleParams(f"{k.value} is not a product family")


def enumerate_family(p: FamilyParams) -> Iterator[FamilyParams]:
    """Every member of the family (small parameters only)."""
    check_params(p)
    if p.kind is Kind.ONE_SIDED_BOUNDED:
        for cols in itertools.combinations(range(p.n, 0, -1), p.sigma - 1):
            for rows in itertools.product(range(1, p.m + 1), repeat=p.sigma - 1):
                yield FamilyParams(p.kind, p.m, p.n, p.sigma, (cols, rows), p.seed, p.options)
        return
    if p.kind is Kind.COLSPAN_GENERAL:
        for w in distinct_shape_arrays(p.n, p.sigma - 1):
            for rows in itertools.product(range(1, p.m + 1), repeat=p.n):
                yield FamilyParams(p.kind, p.m, p.n, p.sigma, (w, rows), p.seed, p.options)
        return
    for ch in itertools.product(*choice_space(p)):
        yield FamilyParams(p.kind, p.m, p.n, p.sigma, tuple(ch), p.seed, p.options)


def sample_family(p: FamilyParams, count: int, seed: int = 0) -> list[FamilyParams]:
    """Up to ``count`` distinct members drawn at random (deterministic in seed)."""
    check_params(p)
    rng = random.Random(seed)
    seen: set = set()
    out = []
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        ch = _random_choice(p, rng)
        if ch not in seen:
            seen.add(ch)
            out.append(FamilyParams(p.kind, p.m, p.n, p.sigma, ch, p.seed, p.options))
    return out


def _random_choice(p: FamilyParams, rng: random.Random) -> tuple:
    if p.kind is Kind.ONE_SIDED_BOUNDED:
        cols = tuple(sorted(rng.sample(range(1, p.n + 1), p.sigma - 1), reverse=True))
        return (cols, tuple(rng.randint(1, p.m) for _ in cols))
    if p.kind is Kind.COLSPAN_GENERAL:
        w = tuple(rng.randrange(p.sigma - 1) for _ in range(p.n))
        return (w, tuple(rng.randint(1, p.m) for _ in range(p.n)))
    return tuple(rng.choice(opts) for opts in choice_space(p))


def distinct_shape_arrays(n: int, sigma: int) -> list[tuple[int, ...]]:
    """One array per distinct Cartesian tree over {0..sigma-1}^n (first in lexicographic order)."""
    _guard(n, sigma)
    seen: dict = {}
    for a in itertools.product(range(sigma), repeat=n):
        t = cartesian_tree(list(a))
        seen.setdefault((t.left, t.right), a)
    return list(seen.values())


# ---------------------------------------------------------------------------
# generators


def gen_family(p: FamilyParams) -> Array2D | WideArray:
    check_params(p)
    if p.choice is None:
        p = FamilyParams(p.kind, p.m, p.n, p.sigma, _random_choice(p, random.Random(p.seed)), p.seed, p.options)
    return _GENERATORS[p.kind](p)


def _one_sided_gen(p: FamilyParams) -> Array2D:
    m, n = p.m, p.n
    rows = p.choice
    _require(len(rows) == n and all(1 <= r <= m for r in rows), "one row in 1..m per column")
    g = np.full((m, n), n + 1, dtype=np.int64)
    increasing = p.option("order", "decreasing") == "increasing"
    for j, r in enumerate(rows, 1):
        g[r - 1, j - 1] = j if increasing else n + 1 - j
    return Array2D(g, n + 2)


def _one_sided_bounded(p: FamilyParams) -> Array2D:
    cols, rows = p.choice
    s = p.sigma
    _require(len(cols) == s - 1 == len(rows), "sigma - 1 columns and rows")
    _require(all(a > b for a, b in zip(cols, cols[1:])), "columns strictly decreasing")
    g = np.full((p.m, p.n), s - 1, dtype=np.int64)
    for k, (c, r) in enumerate(zip(cols, rows)):
        g[r - 1, c - 1] = k
    return Array2D(g, s)


def _two_sided_rows(p: FamilyParams) -> WideArray:
    m, n = p.m, p.n
    steps = p.choice
    _require(len(steps) == m * (n - 1), "m * (n - 1) step bits")
    g = np.zeros((m, n), dtype=np.int64)
    for i in range(1, m + 1):
        # lower rows start lower, so row i holds the minimum of rows 1..i
        v = n * (m - i + 1) - 1
        g[i - 1, 0] = v
        for j in range(1, n):
            v -= steps[(i - 1) * (n - 1) + j - 1]
            g[i - 1, j] = v
    return WideArray(g)


def _two_sided_parallelogram(p: FamilyParams) -> Array2D:
    m, n, s = p.m, p.n, p.sigma
    offs = p.choice
    _require(len(offs) == m * (s - 1), "m * (sigma - 1) offsets")
    g = np.full((m, n), s - 1, dtype=np.int64)
    for level in range(s - 1):
        band = s - 1 - level  # level sigma-2 takes the leftmost band
        for r in range(1, m + 1):
            o = offs[level * m + r - 1]
            if o >= 0:
                g[r - 1, _band_shift(p, r) + 4 * (band - 1) + o] = level
    return Array2D(g, s)


def _three_sided_cols(p: FamilyParams) -> Array2D:
    m, n, s = p.m, p.n, p.sigma
    cols = p.choice
    _require(len(cols) == n, "one row tuple per column")
    g = np.full((m, n), s - 1, dtype=np.int64)
    for j, rows in enumerate(cols):
        _require(len(rows) == s - 1, "sigma - 1 rows per column")
        _require(all(a > b for a, b in zip(rows, rows[1:])) and rows[-1] > 1 and rows[0] <= m, "rows strictly decreasing and > 1")
        for k, r in enumerate(rows):
            g[r - 1, j] = k
    return Array2D(g, s)


def _colspan_binary(p: FamilyParams) -> Array2D:
    rows = p.choice
    _require(len(rows) == p.n and all(1 <= r <= p.m for r in rows), "one entry in 1..m per column")
    g = np.ones((p.m, p.n), dtype=np.int64)
    for j, r in enumerate(rows):
        if r > 1:
            g[r - 1, j] = 0
    return Array2D(g, 2)


def _colspan_general(p: FamilyParams) -> Array2D:
    w, rows = p.choice
    s = p.sigma
    _require(len(w) == p.n == len(rows), "n minima and n rows")
    _require(all(0 <= v <= s - 2 for v in w), "minima in 0..sigma-2")
    g = np.full((p.m, p.n), s - 1, dtype=np.int64)
    for j, (v, r) in enumerate(zip(w, rows)):
        g[r - 1, j] = v
    return Array2D(g, s)


def _diagonal_cells(root: int) -> list[list[tuple[int, int]]]:
    # anti-diagonals of the (root/2) x root sub-block, right to left; cells top-right first
    h, w = root // 2, root
    out = []
    for d in range(h + w - 2, -1, -1):
        out.append([(r, d - r) for r in range(h) if 0 <= d - r < w])
    return out


def _four_sided_blocks(p: FamilyParams) -> Array2D:
    s = p.sigma
    root, bm, bn = _blocks(p)
    h, w = root // 2, root
    flags = p.choice
    nfull = _full_diagonals(root)
    _require(len(flags) == bm * bn * nfull, "one flag per full anti-diagonal per block")
    g = np.full((p.m, p.n), s, dtype=np.int64)
    odd = list(range(1, s, 2))
    diags = _diagonal_cells(root)
    for bi in range(bm):
        for bj in range(bn):
            r0, c0 = bi * root, bj * 2 * root
            for k, v in enumerate(odd):
                g[r0 + k // w, c0 + k % w] = v
            even = iter(range(0, s, 2))
            fk = 0
            for cells in diags:
                vals = [next(even) for _ in cells]
                if len(cells) == h:
                    if flags[(bi * bn + bj) * nfull + fk]:
                        vals.reverse()
                    fk += 1
                for (r, c), v in zip(cells, vals):
                    g[r0 + h + r, c0 + w + c] = v
    return Array2D(g, s + 1)


_GENERATORS: dict[Kind, Callable[[FamilyParams], Array2D | WideArray]] = {
    Kind.ONE_SIDED_GEN: _one_sided_gen,
    Kind.ONE_SIDED_BOUNDED: _one_sided_bounded,
    Kind.TWO_SIDED_ROWS: _two_sided_rows,
    Kind.TWO_SIDED_PARALLELOGRAM: _two_sided_parallelogram,
    Kind.THREE_SIDED_COLS: _three_sided_cols,
    Kind.COLSPAN_BINARY: _colspan_binary,
    Kind.COLSPAN_GENERAL: _colspan_general,
    Kind.FOUR_SIDED_BLOCKS: _four_sided_blocks,
}


# ---------------------------------------------------------------------------
# counting


def r_const(sigma: int) -> float:
    """Growth rate 4 cos^2(pi / (sigma + 3)) of trees with left height <= sigma."""
    return 4.0 * math.cos(math.pi / (sigma + 3)) ** 2


ENUM_LIMIT = 1 << 24


def _guard(n: int, sigma: int) -> None:
    if sigma**n > ENUM_LIMIT:
        raise ExplosionGuard(f"{sigma}^{n} arrays exceed the enumeration limit 2^24")


def count_distinct_cartesian(n: int, sigma: int) -> int:
    """Number of distinct Cartesian tree shapes over all arrays in {0..sigma-1}^n."""
    _guard(n, sigma)
    if n == 0:
        return 1
    return len(distinct_shape_arrays(n, sigma))


def reconstruct_binary(rmq: Callable[[int, int], int], n: int) -> list[int]:
    """Recover a 0/1 array ending in 0 from the answers rmq(i, n) alone."""
    return [0 if rmq(i, n) == i else 1 for i in range(1, n + 1)]
