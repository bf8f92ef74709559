"""Ground-truth references and workload generation for tests and benchmarks.

Nothing here charges a comparison ledger: these are the independent
implementations the instrumented algorithms are checked against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import ComparisonLedger, ContractViolation, Dataset, Element, median_rank
from .range_tree import QueryInterval, build, decompose, query_offline


def oracle_median(dataset: Dataset, q: QueryInterval) -> Element:
    """Median of the slice by full sorting. The reference for everything."""
    if not 1 <= q.lo <= q.hi <= len(dataset):
        raise ContractViolation(f"query [{q.lo}, {q.hi}] invalid for n={len(dataset)}")
    chunk = sorted(dataset.slice(q.lo, q.hi))
    return chunk[median_rank(len(chunk)) - 1]


def multi_select_via_reduction(dataset: Dataset, k: int) -> list[Element]:
    """Every (i*n/k)-th ranked element of the dataset, via range medians.

    Embeds the values in an array four times as long: n sentinels below
    every value, the data itself, then 2n sentinels above. The element of
    rank r in the data is then the median of the prefix of length 2n+2r-1,
    so k range-median queries recover the k evenly spaced order statistics.
    Sentinels are ordinary finite values just outside the data's range, so
    the comparison rules need no special cases.
    """
    n = len(dataset)
    if k < 1 or n % k != 0:
        raise ContractViolation(f"k={k} must divide the dataset length {n}")
    values = [e.value for e in dataset.elements]
    below = min(values) - 1.0
    above = max(values) + 1.0
    tvals = [below] * n + values + [above] * (2 * n)
    embedded = Dataset.from_values(tvals)

    queries = [QueryInterval(1, 2 * n + 2 * (i * n // k) - 1) for i in range(1, k + 1)]
    ledger = ComparisonLedger()
    tree = build(embedded, decompose(len(embedded), queries), min(k * k, len(embedded)), ledger)
    out = []
    for q in queries:
        ans = query_offline(tree, q, ledger)
        out.append(Element(ans.value, ans.index - n))
    return out


@dataclass(frozen=True)
class Workload:
    """Deterministic dataset and query-set recipe.

    `hierarchical` switches the query generator to a laminar family: all
    intervals come from one recursive halving of [1, n], so any two are
    nested or disjoint. `duplicate_rate` shrinks the distinct-value pool
    (1.0 collapses the whole dataset to a single repeated value).
    """

    n: int
    k: int
    seed: int = 0
    duplicate_rate: float = 0.0
    hierarchical: bool = False
    query_seed: int | None = None


def generate(workload: Workload) -> tuple[Dataset, list[QueryInterval]]:
    if workload.n < 1 or workload.k < 1:
        raise ContractViolation("workload needs n >= 1 and k >= 1")
    rng = random.Random(workload.seed)
    n = workload.n
    pool_size = max(1, int(round(n * (1.0 - workload.duplicate_rate))))
    pool = [rng.uniform(-1e6, 1e6) for _ in range(pool_size)]
    if pool_size >= n:
        values = pool[:n]
    else:
        values = [pool[rng.randrange(pool_size)] for _ in range(n)]
    dataset = Dataset.from_values(values)

    qseed = workload.seed + 1 if workload.query_seed is None else workload.query_seed
    qrng = random.Random(qseed)
    if workload.hierarchical:
        queries = _laminar_queries(n, workload.k, qrng)
    else:
        queries = []
        for _ in range(workload.k):
            i = qrng.randint(1, n)
            j = qrng.randint(1, n)
            queries.append(QueryInterval(min(i, j), max(i, j)))
    return dataset, queries


def _laminar_queries(n: int, k: int, rng: random.Random) -> list[QueryInterval]:
    """Sample intervals from one recursive halving until k are drawn."""
    out: list[QueryInterval] = []
    while len(out) < k:
        stack = [(1, n)]
        while stack and len(out) < k:
            lo, hi = stack.pop()
            if rng.random() < 0.5:
                out.append(QueryInterval(lo, hi))
            if hi > lo:
                mid = (lo + hi) // 2
                stack.append((mid + 1, hi))
                stack.append((lo, mid))
    return out
