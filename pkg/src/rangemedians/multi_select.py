"""Selection of a given rank from several sorted or u-sorted arrays.

Two exact drivers work over fully sorted arrays:

* `select_from_sorted` keeps an active range per array, samples evenly
  spaced representatives, merges them, and discards every block whose rank
  window provably misses the target. Each round removes at least 1/8 of the
  active elements.
* `select_from_sorted_fast` avoids merging: it pivots on a weighted median
  of the per-array middle representatives, locates it with binary searches
  over the representative grid, and prunes one side; when the target falls
  inside the pivot's rank window it resolves the pivot's exact rank and
  prunes exactly. Total comparisons stay within O(arrays * log(n/arrays)).

`trim_usorted` runs the same window pruning over u-sorted arrays using only
their marker skeletons (marker ranks are free), shrinking each array to a
short residual interval that still contains the requested element.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Sequence

from .core import ComparisonLedger, ContractViolation, Element, nth_element
from .usorted import USortedArray

# Below this many active elements per array the pooled remainder is handed
# to classical selection.
_BASE_FACTOR = 32


@dataclass
class SortedView:
    """A read-only sorted sequence with an inclusive active range.

    An empty range is represented by hi == lo - 1.
    """

    source: Sequence[Element]
    lo: int
    hi: int

    def __len__(self) -> int:
        return self.hi - self.lo + 1


@dataclass
class TrimResult:
    """Residual per-array intervals plus the rank adjusted for discards.

    sub_ranges are inclusive 0-based (start, end) pairs into each input
    array's data buffer; start > end marks an emptied array. The element of
    rank `adjusted_rank` within the union of the residual intervals is the
    element of the originally requested rank within the full union.
    """

    sub_ranges: list[tuple[int, int]]
    adjusted_rank: int

    @property
    def candidate_total(self) -> int:
        return sum(b - a + 1 for a, b in self.sub_ranges if b >= a)


@dataclass
class SelectionTrace:
    """Optional per-round instrumentation for tests and experiments."""

    levels: list[tuple[int, int]] = field(default_factory=list)  # (n_curr, discarded)
    capture_windows: bool = False
    windows: list[tuple[Element, int, int]] = field(default_factory=list)


def select_from_sorted(
    arrays: Sequence[SortedView],
    rank: int,
    ledger: ComparisonLedger,
    trace: SelectionTrace | None = None,
    validate: bool = False,
) -> Element:
    """Element of the given 1-based rank in the union of sorted arrays."""
    views, total = _init_views(arrays, rank, validate)
    nviews = len(views)
    k = rank
    while True:
        n_curr = sum(hi - lo + 1 for lo, hi in views)
        if n_curr <= _BASE_FACTOR * nviews:
            return _pool_select(arrays, views, k, ledger)

        delta = n_curr // (_BASE_FACTOR * nviews)
        records = []
        for aid, (lo, hi) in enumerate(views):
            if hi < lo:
                continue
            src = arrays[aid].source
            for p in _rep_positions(lo, hi, delta):
                records.append((src[p], aid, p, p - lo, hi - p))
        _merge_records(records, ledger)
        lo_ranks, hi_ranks = _rank_windows(records, n_curr, nviews)
        if trace is not None and trace.capture_windows:
            for rec, lr, hr in zip(records, lo_ranks, hi_ranks):
                trace.windows.append((rec[0], lr, hr))

        k, discarded = _apply_window_cuts(views, records, lo_ranks, hi_ranks, k)
        if trace is not None:
            trace.levels.append((n_curr, discarded))
        # Guaranteed by the rank-window analysis whenever n_curr > 32 * arrays.
        assert discarded >= -(-n_curr // 8), (n_curr, discarded)


def select_from_sorted_fast(
    arrays: Sequence[SortedView],
    rank: int,
    ledger: ComparisonLedger,
    trace: SelectionTrace | None = None,
    validate: bool = False,
) -> Element:
    """Same answer as `select_from_sorted` with cheaper rounds.

    Pivots on a weighted median instead of merging the representative
    lists, so a round costs O(arrays * log(reps-per-array)) comparisons.
    """
    views, total = _init_views(arrays, rank, validate)
    nviews = len(views)
    less = ledger.less
    k = rank
    while True:
        n_curr = sum(hi - lo + 1 for lo, hi in views)
        if n_curr <= _BASE_FACTOR * nviews:
            return _pool_select(arrays, views, k, ledger)

        delta = n_curr // (_BASE_FACTOR * nviews)
        grids: list[list[int] | None] = []
        mids = []
        for aid, (lo, hi) in enumerate(views):
            if hi < lo:
                grids.append(None)
                continue
            reps = _rep_positions(lo, hi, delta)
            grids.append(reps)
            mids.append((arrays[aid].source[reps[len(reps) // 2]], aid, reps[len(reps) // 2]))

        # Weighted median of the middle representatives, weights = active
        # lengths. Sorting the handful of midpoints is the cheapest exact
        # deterministic choice at these sizes.
        _merge_records(mids, ledger)
        acc = 0
        x = xa = xpos = None
        for elem, aid, pos in mids:
            acc += views[aid][1] - views[aid][0] + 1
            if 2 * acc >= n_curr:
                x, xa, xpos = elem, aid, pos
                break

        sure = [0] * nviews
        maybe = [0] * nviews
        cuts = [0] * nviews  # reps strictly below x per array
        for aid, (lo, hi) in enumerate(views):
            if hi < lo:
                continue
            if aid == xa:
                sure[aid] = maybe[aid] = xpos - lo
                continue
            reps = grids[aid]
            src = arrays[aid].source
            c = _grid_count_below(src, reps, x, less)
            cuts[aid] = c
            sure[aid] = (reps[c - 1] - lo + 1) if c > 0 else 0
            maybe[aid] = (reps[c] - lo) if c < len(reps) else hi - lo + 1
        lo_rank = 1 + sum(sure)
        hi_rank = 1 + sum(maybe)
        if trace is not None and trace.capture_windows:
            trace.windows.append((x, lo_rank, hi_rank))

        discarded = 0
        if k < lo_rank:
            # Target is strictly below x: drop every block provably >= x.
            for aid, (lo, hi) in enumerate(views):
                if hi < lo:
                    continue
                if aid == xa:
                    views[aid] = (lo, xpos - 1)
                    discarded += hi - xpos + 1
                    continue
                reps = grids[aid]
                c = cuts[aid]
                if c < len(reps):
                    views[aid] = (lo, reps[c] - 1)
                    discarded += hi - reps[c] + 1
        elif k > hi_rank:
            for aid, (lo, hi) in enumerate(views):
                if hi < lo:
                    continue
                if aid == xa:
                    views[aid] = (xpos + 1, hi)
                    discarded += xpos - lo + 1
                    k -= xpos - lo + 1
                    continue
                reps = grids[aid]
                c = cuts[aid]
                if c > 0:
                    p = reps[c - 1]
                    views[aid] = (p + 1, hi)
                    discarded += p - lo + 1
                    k -= p - lo + 1
        else:
            # Rank window straddles the target: resolve x's exact rank by
            # binary search inside the one uncertain block per array.
            below = [0] * nviews
            for aid, (lo, hi) in enumerate(views):
                if hi < lo:
                    continue
                if aid == xa:
                    below[aid] = xpos - lo
                    continue
                reps = grids[aid]
                c = cuts[aid]
                start = reps[c - 1] + 1 if c > 0 else lo
                end = reps[c] if c < len(reps) else hi + 1
                first_gt = _first_greater(arrays[aid].source, start, end, x, less)
                below[aid] = first_gt - lo
            x_rank = 1 + sum(below)
            if x_rank == k:
                if trace is not None:
                    trace.levels.append((n_curr, n_curr))
                return x
            if k < x_rank:
                # Target is below x: keep only the elements known smaller.
                for aid, (lo, hi) in enumerate(views):
                    if hi < lo:
                        continue
                    new_hi = lo + below[aid] - 1
                    views[aid] = (lo, new_hi)
                    discarded += hi - new_hi
            else:
                for aid, (lo, hi) in enumerate(views):
                    if hi < lo:
                        continue
                    drop = below[aid] + (1 if aid == xa else 0)
                    views[aid] = (lo + drop, hi)
                    discarded += drop
                    k -= drop
        if trace is not None:
            trace.levels.append((n_curr, discarded))
        assert discarded >= 1, "selection round made no progress"


def trim_usorted(
    arrays: Sequence[USortedArray],
    rank: int,
    ledger: ComparisonLedger,
    trace: SelectionTrace | None = None,
) -> TrimResult:
    """Shrink u-sorted arrays to short intervals still holding the target.

    Runs the representative pruning over marker skeletons only: marker
    ranks inside their own arrays are exact by position, while non-marker
    elements stay uncertain within their segment. Active ranges snap to
    segment boundaries so discard counts stay exact. Stops once every
    array is down to about two segments or nothing more can be discarded.
    """
    if not arrays:
        raise ContractViolation("need at least one array to trim")
    u = arrays[0].u
    for a in arrays:
        if a.u != u:
            raise ContractViolation("all arrays must share one relaxation parameter")
    total = sum(len(a) for a in arrays)
    if not 1 <= rank <= total:
        raise ContractViolation(f"rank {rank} out of range for {total} elements")

    nviews = len(arrays)
    views: list[tuple[int, int]] = [(0, len(a) - 1) for a in arrays]
    bounds = [a.segment_bound for a in arrays]
    k = rank
    while True:
        n_curr = sum(hi - lo + 1 for lo, hi in views)
        if all(hi - lo + 1 <= 2 * bounds[aid] + 2 for aid, (lo, hi) in enumerate(views)):
            break
        delta = max(1, n_curr // (_BASE_FACTOR * nviews))
        records = []
        for aid, (lo, hi) in enumerate(views):
            if hi < lo:
                continue
            arr = arrays[aid]
            for p in _marker_rep_positions(arr.markers, lo, hi, delta):
                records.append((arr.data[p], aid, p, p - lo, hi - p))
        if not records:
            break
        _merge_records(records, ledger)
        lo_ranks, hi_ranks = _rank_windows(records, n_curr, nviews)
        if trace is not None and trace.capture_windows:
            for rec, lr, hr in zip(records, lo_ranks, hi_ranks):
                trace.windows.append((rec[0], lr, hr))
        k, discarded = _apply_window_cuts(views, records, lo_ranks, hi_ranks, k)
        if trace is not None:
            trace.levels.append((n_curr, discarded))
        if discarded == 0:
            break

    result = TrimResult(sub_ranges=list(views), adjusted_rank=k)
    assert 1 <= k <= result.candidate_total
    return result


# ---------------------------------------------------------------------------
# shared machinery


def _init_views(arrays, rank, validate):
    if not arrays:
        raise ContractViolation("need at least one array")
    total = sum(v.hi - v.lo + 1 for v in arrays)
    if not 1 <= rank <= total:
        raise ContractViolation(f"rank {rank} out of range for {total} elements")
    if validate:
        for v in arrays:
            for i in range(v.lo, v.hi):
                if not v.source[i] < v.source[i + 1]:
                    raise ContractViolation("view is not sorted")
    return [(v.lo, v.hi) for v in arrays], total


def _rep_positions(lo: int, hi: int, delta: int) -> list[int]:
    """Evenly spaced sample positions in [lo, hi], blocks <= ceil(len/u_i).

    u_i = 4 + ceil(len/delta); rounding up keeps every block within the
    nominal width. Duplicate positions from short ranges are dropped.
    """
    ln = hi - lo + 1
    ui = 4 + -(-ln // delta)
    out: list[int] = []
    prev = -1
    for j in range(1, ui):
        p = lo + -(-(j * ln) // ui) - 1
        if p != prev:
            out.append(p)
            prev = p
    return out


def _marker_rep_positions(markers: list[int], lo: int, hi: int, delta: int) -> list[int]:
    """Marker positions approximating the evenly spaced grid inside [lo, hi]."""
    ln = hi - lo + 1
    ui = 4 + -(-ln // delta)
    out: list[int] = []
    prev = -1
    for j in range(1, ui):
        ideal = lo + -(-(j * ln) // ui) - 1
        i = bisect_left(markers, ideal)
        if i < len(markers) and markers[i] <= hi and markers[i] != prev:
            out.append(markers[i])
            prev = markers[i]
    return out


def _merge_records(records: list, ledger: ComparisonLedger) -> None:
    """Sort records (element first) charging one comparison per order test."""

    def cmp(ra, rb):
        ledger.count += 1
        return -1 if ra[0] < rb[0] else 1

    records.sort(key=cmp_to_key(cmp))


def _rank_windows(records, n_curr: int, nviews: int):
    """Per-record global rank interval [lo, hi] from merged order.

    For a representative r, elements of another array up to that array's
    last representative below r are certainly smaller; elements beyond its
    first representative above r are certainly larger. Own-array counts are
    exact. Pure arithmetic: charges nothing.
    """
    m = len(records)
    lo_ranks = [0] * m
    hi_ranks = [0] * m
    seen = [0] * nviews
    total_seen = 0
    for i, (elem, aid, pos, below, above) in enumerate(records):
        lo_ranks[i] = 1 + below + total_seen - seen[aid]
        new = below + 1
        total_seen += new - seen[aid]
        seen[aid] = new
    seen = [0] * nviews
    total_seen = 0
    for i in range(m - 1, -1, -1):
        elem, aid, pos, below, above = records[i]
        hi_ranks[i] = n_curr - (above + total_seen - seen[aid])
        new = above + 1
        total_seen += new - seen[aid]
        seen[aid] = new
    return lo_ranks, hi_ranks


def _apply_window_cuts(views, records, lo_ranks, hi_ranks, k):
    """Discard blocks whose rank windows provably exclude k.

    Below the last representative whose window tops out under k everything
    is smaller than the target; above the first representative whose window
    starts past k everything is larger. Returns (new k, discarded count).
    """
    nviews = len(views)
    low_cut = [-1] * nviews
    high_cut = [-1] * nviews
    for i, (elem, aid, pos, below, above) in enumerate(records):
        if hi_ranks[i] < k:
            low_cut[aid] = pos
        elif lo_ranks[i] > k and high_cut[aid] == -1:
            high_cut[aid] = pos
    discarded = 0
    for aid in range(nviews):
        lo, hi = views[aid]
        if hi < lo:
            continue
        if low_cut[aid] >= 0:
            cnt = low_cut[aid] - lo + 1
            discarded += cnt
            k -= cnt
            lo = low_cut[aid] + 1
        if high_cut[aid] >= 0 and high_cut[aid] <= hi:
            discarded += hi - high_cut[aid] + 1
            hi = high_cut[aid] - 1
        views[aid] = (lo, hi)
    return k, discarded


def _pool_select(arrays, views, k, ledger):
    pool: list[Element] = []
    for aid, (lo, hi) in enumerate(views):
        if hi >= lo:
            pool.extend(arrays[aid].source[lo : hi + 1])
    nth_element(pool, 0, len(pool), k - 1, ledger)
    return pool[k - 1]


def _grid_count_below(src, positions, x, less):
    """Number of grid positions whose element is below x."""
    lo, hi = 0, len(positions)
    while lo < hi:
        mid = (lo + hi) // 2
        if less(src[positions[mid]], x):
            lo = mid + 1
        else:
            hi = mid
    return lo


def _first_greater(src, start, end, x, less):
    """First index in sorted src[start:end] whose element exceeds x."""
    while start < end:
        mid = (start + end) // 2
        if less(x, src[mid]):
            end = mid
        else:
            start = mid + 1
    return start
