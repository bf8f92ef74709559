"""Range-median engine: atomic intervals, merge tree, and query drivers.

The array is split into atomic intervals that no query endpoint cuts
through; a balanced binary tree merges their u-sorted arrays bottom-up, so
any aligned interval is tiled by O(log m) node arrays (its canonical
cover). A median query trims those arrays down to short residual intervals
and finishes with classical selection. Three drivers share this machinery:

* offline — all queries known up front; atomic intervals follow their
  endpoints and u defaults to min(k^2, n).
* online with k known — equal-length atomic intervals; the two boundary
  cells a query cuts through are clipped and u-sorted on the fly.
* online with k unknown — guesses the query count starting at 10, squares
  the guess and rebuilds from scratch whenever it is exceeded.

`query_slow` answers from fully sorted tree nodes instead and serves as an
independent implementation for differential testing.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import NamedTuple, Sequence

from .core import (
    ComparisonLedger,
    ContractViolation,
    Dataset,
    Element,
    median_rank,
    nth_element,
)
from .multi_select import SortedView, select_from_sorted, trim_usorted
from .usorted import USortedArray, merge_usorted, u_sort

_INITIAL_GUESS = 10


class QueryInterval(NamedTuple):
    """1-based inclusive array positions."""

    lo: int
    hi: int


def _validate_query(q: QueryInterval, n: int) -> None:
    if not 1 <= q.lo <= q.hi <= n:
        raise ContractViolation(f"query [{q.lo}, {q.hi}] invalid for array of length {n}")


class AtomicDecomposition:
    """Cut positions partitioning [1..n] into atomic intervals.

    boundaries[0] == 0 and boundaries[-1] == n; cell i is
    (boundaries[i]+1, boundaries[i+1]).
    """

    __slots__ = ("boundaries", "_cut_set")

    def __init__(self, boundaries: list[int]):
        self.boundaries = boundaries
        self._cut_set = set(boundaries)

    @property
    def cells(self) -> list[tuple[int, int]]:
        b = self.boundaries
        return [(b[i] + 1, b[i + 1]) for i in range(len(b) - 1)]

    def cell_count(self) -> int:
        return len(self.boundaries) - 1

    def is_aligned(self, q: QueryInterval) -> bool:
        return (q.lo - 1) in self._cut_set and q.hi in self._cut_set

    def cell_index(self, position: int) -> int:
        """Index of the cell containing a 1-based position."""
        return bisect_left(self.boundaries, position) - 1


def decompose(n: int, queries: Sequence[QueryInterval]) -> AtomicDecomposition:
    """Cut [1..n] at every query endpoint.

    Cells before the first cut and after the last are kept as atomic
    intervals too, so at most 2k+1 cells cover the array exactly once.
    """
    cuts = {0, n}
    for q in queries:
        _validate_query(q, n)
        cuts.add(q.lo - 1)
        cuts.add(q.hi)
    return AtomicDecomposition(sorted(cuts))


def equal_decomposition(n: int, cells: int) -> AtomicDecomposition:
    """Split [1..n] into `cells` intervals of (near) equal length."""
    cells = max(1, min(cells, n))
    return AtomicDecomposition([i * n // cells for i in range(cells + 1)])


@dataclass(slots=True)
class TreeNode:
    lo: int
    hi: int
    array: USortedArray
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None


class MergeTree:
    """Balanced binary tree over atomic intervals holding u-sorted arrays."""

    __slots__ = ("root", "decomposition", "u", "size")

    def __init__(self, root: TreeNode, decomposition: AtomicDecomposition, u: int, size: int):
        self.root = root
        self.decomposition = decomposition
        self.u = u
        self.size = size

    def nodes(self) -> list[TreeNode]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            if node.left is not None:
                stack.append(node.left)
                stack.append(node.right)
        return out


def build(
    dataset: Dataset, decomposition: AtomicDecomposition, u: int, ledger: ComparisonLedger
) -> MergeTree:
    """u-sort every atomic interval, then merge pairwise up the tree."""
    if u < 1:
        raise ContractViolation(f"relaxation parameter must be >= 1, got {u}")
    level = [
        TreeNode(s, e, u_sort(dataset.slice(s, e), u, ledger))
        for s, e in decomposition.cells
    ]
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            a, b = level[i], level[i + 1]
            nxt.append(TreeNode(a.lo, b.hi, merge_usorted(a.array, b.array, ledger), a, b))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return MergeTree(level[0], decomposition, u, len(dataset))


def canonical_cover(tree: MergeTree, q: QueryInterval) -> list[TreeNode]:
    """Maximal disjoint nodes whose ranges tile q exactly, left to right."""
    return _cover(tree.root, q.lo, q.hi)


def _cover(root: TreeNode, lo: int, hi: int) -> list[TreeNode]:
    out: list[TreeNode] = []
    stack = [root]
    while stack:
        node = stack.pop()
        if node.hi < lo or node.lo > hi:
            continue
        if lo <= node.lo and node.hi <= hi:
            out.append(node)
            continue
        if node.left is None:
            raise ContractViolation(
                f"query [{lo}, {hi}] does not align with atomic boundaries"
            )
        stack.append(node.right)
        stack.append(node.left)
    return out


@dataclass(slots=True)
class QueryStats:
    """Per-query instrumentation used by the scaling experiments."""

    cover_size: int = 0
    candidate_total: int = 0


def query_offline(
    tree: MergeTree,
    q: QueryInterval,
    ledger: ComparisonLedger,
    stats: QueryStats | None = None,
) -> Element:
    """Median of the dataset slice q, for q aligned with the decomposition."""
    _validate_query(q, tree.size)
    if not tree.decomposition.is_aligned(q):
        raise ContractViolation(
            f"query [{q.lo}, {q.hi}] has endpoints inside atomic intervals"
        )
    cover = canonical_cover(tree, q)
    return _median_from_usorted([n.array for n in cover], q.hi - q.lo + 1, ledger, stats)


def _median_from_usorted(
    arrays: list[USortedArray],
    length: int,
    ledger: ComparisonLedger,
    stats: QueryStats | None,
) -> Element:
    rank = median_rank(length)
    trimmed = trim_usorted(arrays, rank, ledger)
    pool: list[Element] = []
    for arr, (a, b) in zip(arrays, trimmed.sub_ranges):
        if b >= a:
            pool.extend(arr.data[a : b + 1])
    if stats is not None:
        stats.cover_size = len(arrays)
        stats.candidate_total = len(pool)
    nth_element(pool, 0, len(pool), trimmed.adjusted_rank - 1, ledger)
    return pool[trimmed.adjusted_rank - 1]


class OnlineEngine:
    """Mutable driver state for queries arriving one at a time.

    With `k` given, the array is pre-split into u = min(k^2, n) equal
    atomic intervals. Without it, the engine starts from a guess of 10
    queries and squares the guess (rebuilding from the raw dataset) each
    time the count exceeds it. Query calls must be serialized; rebuild
    comparisons are charged to `build_ledger`, per-query work to the
    ledger passed with each query.
    """

    __slots__ = (
        "dataset",
        "known_k",
        "guess",
        "u",
        "u_override",
        "tree",
        "answered",
        "builds",
        "build_ledger",
    )

    def __init__(self, dataset: Dataset, k: int | None = None, u_override: int | None = None):
        if k is not None and k < 1:
            raise ContractViolation(f"query count must be >= 1, got {k}")
        self.dataset = dataset
        self.known_k = k
        self.guess = k if k is not None else _INITIAL_GUESS
        self.u_override = u_override
        self.answered = 0
        self.builds = 0
        self.build_ledger = ComparisonLedger()
        self.u = 0
        self._rebuild()

    def _rebuild(self) -> None:
        n = len(self.dataset)
        if self.u_override is not None:
            self.u = min(self.u_override, n)
        else:
            self.u = min(self.guess * self.guess, n)
        dec = equal_decomposition(n, self.u)
        self.tree = build(self.dataset, dec, self.u, self.build_ledger)
        self.builds += 1


def query_online_known_k(
    engine: OnlineEngine,
    q: QueryInterval,
    ledger: ComparisonLedger,
    stats: QueryStats | None = None,
) -> Element:
    """Median of q against the engine's current tree.

    Whole atomic intervals inside q come from the canonical cover; the one
    or two boundary cells q cuts through are clipped to q and u-sorted on
    the fly (and thrown away afterwards).
    """
    tree = engine.tree
    _validate_query(q, tree.size)
    dec = tree.decomposition
    bounds = dec.boundaries
    jlo = dec.cell_index(q.lo)
    jhi = dec.cell_index(q.hi)

    arrays: list[USortedArray] = []
    lo_aligned = q.lo == bounds[jlo] + 1
    hi_aligned = q.hi == bounds[jhi + 1]
    if jlo == jhi and not (lo_aligned and hi_aligned):
        arrays.append(u_sort(engine.dataset.slice(q.lo, q.hi), tree.u, ledger))
    else:
        frag_lo = None if lo_aligned else (q.lo, bounds[jlo + 1])
        frag_hi = None if hi_aligned else (bounds[jhi] + 1, q.hi)
        cover_lo = q.lo if lo_aligned else bounds[jlo + 1] + 1
        cover_hi = q.hi if hi_aligned else bounds[jhi]
        if cover_lo <= cover_hi:
            arrays.extend(
                n.array for n in _cover(tree.root, cover_lo, cover_hi)
            )
        for frag in (frag_lo, frag_hi):
            if frag is not None:
                arrays.append(u_sort(engine.dataset.slice(*frag), tree.u, ledger))
    engine.answered += 1
    return _median_from_usorted(arrays, q.hi - q.lo + 1, ledger, stats)


def query_online(
    engine: OnlineEngine,
    q: QueryInterval,
    ledger: ComparisonLedger,
    stats: QueryStats | None = None,
) -> Element:
    """Median of q under guess-squaring when the query count is unknown."""
    if engine.answered >= engine.guess:
        engine.guess = engine.guess * engine.guess
        new_u = min(engine.guess * engine.guess, len(engine.dataset))
        if new_u != engine.u:
            engine._rebuild()
    return query_online_known_k(engine, q, ledger, stats)


def query_slow(
    dataset: Dataset,
    queries: Sequence[QueryInterval],
    ledger: ComparisonLedger,
    per_query_counts: list[int] | None = None,
) -> list[Element]:
    """Answer all queries from a tree of fully sorted atomic intervals.

    Sorts every atomic interval outright, merges sorted arrays up the
    tree, and answers each query by multi-array selection over its cover.
    Deliberately shares no code with the u-sorted path beyond the
    selection primitive, so the two can be tested against each other.
    """
    n = len(dataset)
    dec = decompose(n, queries)

    def charged_cmp(a: Element, b: Element) -> int:
        ledger.count += 1
        return -1 if a < b else 1

    key = cmp_to_key(charged_cmp)
    level: list[tuple[int, int, list[Element], object, object]] = []
    for s, e in dec.cells:
        cell = dataset.slice(s, e)
        cell.sort(key=key)
        level.append((s, e, cell, None, None))
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            a, b = level[i], level[i + 1]
            nxt.append((a[0], b[1], _merge_two(a[2], b[2], ledger), a, b))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    root = level[0]

    answers = []
    for q in queries:
        before = ledger.count
        covered = _cover_slow(root, q.lo, q.hi)
        views = [SortedView(arr, 0, len(arr) - 1) for arr in covered]
        answers.append(
            select_from_sorted(views, median_rank(q.hi - q.lo + 1), ledger)
        )
        if per_query_counts is not None:
            per_query_counts.append(ledger.count - before)
    return answers


def _merge_two(a: list[Element], b: list[Element], ledger: ComparisonLedger) -> list[Element]:
    out: list[Element] = []
    i = j = 0
    na, nb = len(a), len(b)
    less = ledger.less
    while i < na and j < nb:
        if less(a[i], b[j]):
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:] if i < na else b[j:])
    return out


def _cover_slow(node, lo: int, hi: int) -> list[list[Element]]:
    out: list[list[Element]] = []
    stack = [node]
    while stack:
        s, e, arr, left, right = stack.pop()
        if e < lo or s > hi:
            continue
        if lo <= s and e <= hi:
            out.append(arr)
            continue
        if left is None:
            raise ContractViolation(f"query [{lo}, {hi}] misaligned in slow driver")
        stack.append(right)
        stack.append(left)
    return out
