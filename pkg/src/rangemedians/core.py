"""Ordering primitives, comparison accounting, and linear-time selection.

Everything in this package orders elements by (value, index), so duplicate
values are allowed in the input and the order is still strict and total.
Every order test between two elements anywhere in the library goes through a
:class:`ComparisonLedger`, which is how the comparison budgets of the higher
level algorithms are measured.
"""

from __future__ import annotations

import enum
from typing import MutableSequence, NamedTuple, Sequence


class ContractViolation(ValueError):
    """A caller broke a documented precondition."""


class Element(NamedTuple):
    """One array entry: its value plus its original 0-based position.

    Tuple comparison gives the lexicographic (value, index) order directly,
    which is the strict total order used everywhere. Two distinct elements
    never compare equal because indices are unique within a dataset.
    """

    value: float
    index: int


class Ordering(enum.Enum):
    LESS = -1
    GREATER = 1


class ComparisonLedger:
    """Monotone counter charged once per element comparison.

    Pass one ledger per logical operation (a build, a query, ...) so costs
    can be attributed separately. `less` is the raw primitive; `compare`
    wraps it with a symbolic result.
    """

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def less(self, a: Element, b: Element) -> bool:
        self.count += 1
        return a < b


def compare(a: Element, b: Element, ledger: ComparisonLedger) -> Ordering:
    """Order two elements, charging exactly one comparison.

    Never returns an "equal" result: ties on value are broken by index, and
    equal (value, index) pairs are ruled out by the dataset invariant.
    """
    return Ordering.LESS if ledger.less(a, b) else Ordering.GREATER


class Dataset:
    """Immutable input array of elements with positional indices 0..n-1."""

    __slots__ = ("elements",)

    def __init__(self, elements: Sequence[Element]):
        if len(elements) < 1:
            raise ContractViolation("dataset must hold at least one element")
        for i, e in enumerate(elements):
            if e.index != i:
                raise ContractViolation(f"element at position {i} has index {e.index}")
            if e.value != e.value:  # NaN breaks the total order
                raise ContractViolation(f"non-orderable value at position {i}")
        self.elements = list(elements)

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Dataset":
        return cls([Element(v, i) for i, v in enumerate(values)])

    def __len__(self) -> int:
        return len(self.elements)

    def slice(self, lo: int, hi: int) -> list[Element]:
        """Copy of the 1-based inclusive range [lo, hi]."""
        return self.elements[lo - 1 : hi]


def median_rank(m: int) -> int:
    """1-based rank of the median of m items: ceil(m/2)."""
    if m < 1:
        raise ContractViolation("median of an empty collection is undefined")
    return (m + 1) // 2


def select(items: MutableSequence[Element], rank: int, ledger: ComparisonLedger) -> Element:
    """Element of the given 1-based rank, deterministic worst-case linear time.

    Median-of-medians with groups of five; charges at most 24*len(items)
    comparisons. `items` is partially reordered in place: afterwards the
    answer sits at items[rank-1] with smaller elements before it and larger
    ones after it (the nth_element postcondition, which u-sorting exploits).
    """
    n = len(items)
    if not 1 <= rank <= n:
        raise ContractViolation(f"rank {rank} out of range for {n} items")
    nth_element(items, 0, n, rank - 1, ledger)
    return items[rank - 1]


# Ranges at or below this size are finished by insertion sort. Small enough
# that the quadratic cost stays under the 24n budget (66 <= 24*12).
_SORT_CUTOFF = 12


def nth_element(
    buf: MutableSequence[Element], lo: int, hi: int, target: int, ledger: ComparisonLedger
) -> None:
    """Place the target-th smallest (absolute index) of buf[lo:hi] at buf[target].

    Afterwards buf[lo:target] <= buf[target] <= buf[target+1:hi].
    """
    less = ledger.less
    while True:
        n = hi - lo
        if n <= 1:
            return
        if n <= _SORT_CUTOFF:
            _insertion_sort(buf, lo, hi, less)
            return

        # Median of each group of five, moved to the front of the range.
        ngroups = 0
        for gs in range(lo, hi, 5):
            ge = gs + 5
            if ge > hi:
                ge = hi
            mi = _small_median(buf, gs, ge, less)
            dst = lo + ngroups
            buf[dst], buf[mi] = buf[mi], buf[dst]
            ngroups += 1

        # Pivot = median of the group medians, placed by recursion.
        mid = lo + (ngroups - 1) // 2
        nth_element(buf, lo, lo + ngroups, mid, ledger)
        p = _partition(buf, lo, hi, mid, less)

        if target == p:
            return
        if target < p:
            hi = p
        else:
            lo = p + 1


def _insertion_sort(buf, lo, hi, less) -> None:
    for i in range(lo + 1, hi):
        key = buf[i]
        j = i
        while j > lo and less(key, buf[j - 1]):
            buf[j] = buf[j - 1]
            j -= 1
        buf[j] = key


def _partition(buf, lo, hi, pidx, less) -> int:
    """Lomuto partition around buf[pidx]; returns the pivot's final index."""
    pivot = buf[pidx]
    last = hi - 1
    buf[pidx], buf[last] = buf[last], buf[pidx]
    store = lo
    for i in range(lo, last):
        if less(buf[i], pivot):
            if i != store:
                buf[store], buf[i] = buf[i], buf[store]
            store += 1
    buf[last], buf[store] = buf[store], buf[last]
    return store


def _small_median(buf, lo, hi, less) -> int:
    """Index of the rank-ceil(n/2) element of buf[lo:hi], for n <= 5.

    The five-element case is the classic 6-comparison scheme: order two
    pairs, drop the smaller pair minimum (it cannot be the median), then
    take the second smallest of the surviving four.
    """
    n = hi - lo
    if n == 1:
        return lo
    if n == 2:
        # rank ceil(2/2) = 1: the smaller element
        return lo if less(buf[lo], buf[lo + 1]) else lo + 1
    if n == 3:
        return _median3(buf, lo, lo + 1, lo + 2, less)
    if n == 4:
        a, b, c, d = lo, lo + 1, lo + 2, lo + 3
        if less(buf[b], buf[a]):
            a, b = b, a
        if less(buf[d], buf[c]):
            c, d = d, c
        # rank 2 of two ordered pairs, one more comparison each way
        if less(buf[a], buf[c]):
            return b if less(buf[b], buf[c]) else c
        return d if less(buf[d], buf[a]) else a

    a, b, c, d, e = lo, lo + 1, lo + 2, lo + 3, lo + 4
    if less(buf[b], buf[a]):
        a, b = b, a
    if less(buf[d], buf[c]):
        c, d = d, c
    # Make a the smaller pair minimum; a <= b and a <= c <= d, so a is
    # below at least three others and cannot be the rank-3 element.
    if less(buf[c], buf[a]):
        a, b, c, d = c, d, a, b
    # Median of five = second smallest of {b, c, d, e} with c <= d known.
    f, g = (b, e) if less(buf[b], buf[e]) else (e, b)
    if less(buf[f], buf[c]):
        return g if less(buf[g], buf[c]) else c
    return f if less(buf[f], buf[d]) else d


def _median3(buf, i, j, k, less) -> int:
    if less(buf[i], buf[j]):
        if less(buf[j], buf[k]):
            return j
        return k if less(buf[i], buf[k]) else i
    if less(buf[i], buf[k]):
        return i
    return k if less(buf[j], buf[k]) else j
