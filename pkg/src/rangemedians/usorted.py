"""Relaxed sorting: arrays with a sparse skeleton of exactly-placed markers.

An array is u-sorted when a sorted subset of "marker" elements sits at the
positions they would occupy in a full sort, every non-marker element lies
between its bracketing markers, and no run between markers is longer than
ceil(len/u). Construction costs O(len * log u) comparisons and two u-sorted
arrays merge in O(len) comparisons, which is what makes the range-median
tree cheaper than one built on fully sorted nodes.
"""

from __future__ import annotations

from typing import Sequence

from .core import ComparisonLedger, ContractViolation, Element, median_rank, nth_element


class USortedArray:
    """An element buffer plus the positions of its markers.

    Immutable after construction; safe to share read-only. `markers` is a
    strictly increasing list of 0-based positions into `data`.
    """

    __slots__ = ("data", "markers", "u")

    def __init__(self, data: list[Element], markers: list[int], u: int):
        self.data = data
        self.markers = markers
        self.u = u

    def __len__(self) -> int:
        return len(self.data)

    @property
    def segment_bound(self) -> int:
        """Max allowed run of non-marker positions: ceil(len/u)."""
        return -(-len(self.data) // self.u)


def u_sort(data: Sequence[Element], u: int, ledger: ComparisonLedger) -> USortedArray:
    """u-sort a copy of `data` by recursive median partitioning.

    Splits at the median (placed exactly by selection, which also
    partitions the range) and recurses until every run is within the
    segment bound. With u >= len the result is fully sorted. Charges at
    most 24 * len * (1 + ceil(log2 u)) comparisons.
    """
    if u < 1:
        raise ContractViolation(f"relaxation parameter must be >= 1, got {u}")
    if not data:
        raise ContractViolation("cannot u-sort an empty array")
    buf = list(data)
    n = len(buf)
    bound = -(-n // u)
    markers: list[int] = []
    stack = [(0, n)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo <= bound:
            continue
        t = lo + median_rank(hi - lo) - 1
        nth_element(buf, lo, hi, t, ledger)
        markers.append(t)
        stack.append((lo, t))
        stack.append((t + 1, hi))
    markers.sort()
    return USortedArray(buf, markers, u)


def merge_usorted(x: USortedArray, y: USortedArray, ledger: ComparisonLedger) -> USortedArray:
    """Merge two u-sorted arrays into one, in O(|x| + |y|) comparisons.

    Three phases:
      1. Thread x's markers through y front to back, partitioning the y
         segment each one lands in, so all markers of both inputs end up in
         one combined skeleton with exact positions.
      2. Drop each non-marker element of x into the skeleton by binary
         search over the markers spanning its home segment.
      3. Rebuild the marker set: split any over-long run at its median,
         then greedily demote markers whose neighbouring runs fit in one,
         leaving at most 2u+1 markers and runs within the new bound.
    """
    if x.u != y.u:
        raise ContractViolation(f"mismatched relaxation parameters: {x.u} != {y.u}")
    u = x.u
    less = ledger.less
    ydata = y.data
    ymark_pos = y.markers
    ny = len(ymark_pos)
    ymark_elems = [ydata[p] for p in ymark_pos]

    # y's segments: ysegs[i] precedes marker i, tail follows the last one.
    ysegs: list[list[Element]] = []
    prev = 0
    for p in ymark_pos:
        ysegs.append(ydata[prev:p])
        prev = p + 1
    tail = ydata[prev:]

    xmark_pos = x.markers
    xmark_elems = [x.data[p] for p in xmark_pos]

    # Phase 1: combined skeleton. buckets[i] holds the (unordered) elements
    # strictly between markers[i-1] and markers[i].
    skel_markers: list[Element] = []
    buckets: list[list[Element]] = []
    x_skel_idx: list[int] = []
    yi = 0
    pending = ysegs[0] if ny else tail
    for b in xmark_elems:
        while yi < ny and less(ymark_elems[yi], b):
            buckets.append(pending)
            skel_markers.append(ymark_elems[yi])
            yi += 1
            pending = ysegs[yi] if yi < ny else tail
        lows: list[Element] = []
        highs: list[Element] = []
        for e in pending:
            if less(e, b):
                lows.append(e)
            else:
                highs.append(e)
        buckets.append(lows)
        x_skel_idx.append(len(skel_markers))
        skel_markers.append(b)
        pending = highs
    while yi < ny:
        buckets.append(pending)
        skel_markers.append(ymark_elems[yi])
        yi += 1
        pending = ysegs[yi] if yi < ny else tail
    buckets.append(pending)

    # Phase 2: x's segment elements. Candidate markers for a segment are
    # exactly the skeleton markers strictly between its bracketing x
    # markers, so each insertion costs log of that span.
    nxm = len(xmark_pos)
    seg_start = 0
    for j in range(nxm + 1):
        seg_end = xmark_pos[j] if j < nxm else len(x.data)
        span_lo = (x_skel_idx[j - 1] + 1) if j > 0 else 0
        span_hi = x_skel_idx[j] if j < nxm else len(skel_markers)
        for q in range(seg_start, seg_end):
            e = x.data[q]
            mlo, mhi = span_lo, span_hi
            while mlo < mhi:
                mid = (mlo + mhi) // 2
                if less(e, skel_markers[mid]):
                    mhi = mid
                else:
                    mlo = mid + 1
            buckets[mlo].append(e)
        seg_start = seg_end + 1

    # Phase 3: renormalise runs for the merged length.
    nz = len(x.data) + len(ydata)
    gz = -(-nz // u)

    buckets2: list[list[Element]] = []
    markers2: list[Element] = []
    for i, bucket in enumerate(buckets):
        if i:
            markers2.append(skel_markers[i - 1])
        bs, ms = _split_oversized(bucket, gz, ledger)
        buckets2.append(bs[0])
        for j, m in enumerate(ms):
            markers2.append(m)
            buckets2.append(bs[j + 1])

    final_buckets = [buckets2[0]]
    final_markers: list[Element] = []
    for m, bucket in zip(markers2, buckets2[1:]):
        cur = final_buckets[-1]
        if len(cur) + 1 + len(bucket) <= gz:
            cur.append(m)  # demoted to a plain segment element
            cur.extend(bucket)
        else:
            final_markers.append(m)
            final_buckets.append(bucket)

    data: list[Element] = list(final_buckets[0])
    positions: list[int] = []
    for m, bucket in zip(final_markers, final_buckets[1:]):
        positions.append(len(data))
        data.append(m)
        data.extend(bucket)
    return USortedArray(data, positions, u)


def _split_oversized(
    bucket: list[Element], limit: int, ledger: ComparisonLedger
) -> tuple[list[list[Element]], list[Element]]:
    """Split a run into runs of at most `limit` via median selection.

    Returns (runs, markers) with len(runs) == len(markers) + 1, in order.
    Splits are rare (a merged run exceeds the bound by at most two), so the
    cost disappears into the merge's linear budget.
    """
    if len(bucket) <= limit:
        return [bucket], []
    t = median_rank(len(bucket)) - 1
    nth_element(bucket, 0, len(bucket), t, ledger)
    lb, lm = _split_oversized(bucket[:t], limit, ledger)
    rb, rm = _split_oversized(bucket[t + 1 :], limit, ledger)
    return lb + rb, lm + [bucket[t]] + rm


def validate_usorted(x: USortedArray) -> bool:
    """Full structural check; charges nothing (test-side only).

    Verifies marker positions are increasing and in range, the marker count
    stays within 20u, every marker is globally placed (all earlier elements
    smaller, all later larger), and no run exceeds ceil(len/u).
    """
    n = len(x.data)
    if x.u < 1 or n == 0:
        return False
    g = -(-n // x.u)
    if len(x.markers) > 20 * x.u:
        return False
    prev_p = -1
    lower: Element | None = None
    for p in x.markers:
        if not (0 <= p < n) or p <= prev_p:
            return False
        m = x.data[p]
        if lower is not None and not lower < m:
            return False
        if p - prev_p - 1 > g:
            return False
        for q in range(prev_p + 1, p):
            e = x.data[q]
            if not e < m:
                return False
            if lower is not None and not lower < e:
                return False
        prev_p = p
        lower = m
    if n - prev_p - 1 > g:
        return False
    if lower is not None:
        for q in range(prev_p + 1, n):
            if not lower < x.data[q]:
                return False
    return True


def marker_ranks(x: USortedArray) -> list[tuple[Element, int]]:
    """Each marker with its exact 1-based rank within the array.

    Markers sit at their final sorted positions, so rank is position + 1;
    no comparisons are needed or charged.
    """
    return [(x.data[p], p + 1) for p in x.markers]
