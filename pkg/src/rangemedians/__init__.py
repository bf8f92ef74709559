"""Batched and online range-median queries with exact comparison counting."""

from .core import (
    ComparisonLedger,
    ContractViolation,
    Dataset,
    Element,
    Ordering,
    compare,
    median_rank,
    select,
)
from .multi_select import (
    SelectionTrace,
    SortedView,
    TrimResult,
    select_from_sorted,
    select_from_sorted_fast,
    trim_usorted,
)
from .oracle import Workload, generate, multi_select_via_reduction, oracle_median
from .range_tree import (
    AtomicDecomposition,
    MergeTree,
    OnlineEngine,
    QueryInterval,
    QueryStats,
    build,
    canonical_cover,
    decompose,
    equal_decomposition,
    query_offline,
    query_online,
    query_online_known_k,
    query_slow,
)
from .usorted import USortedArray, marker_ranks, merge_usorted, u_sort, validate_usorted

__all__ = [
    "AtomicDecomposition",
    "ComparisonLedger",
    "ContractViolation",
    "Dataset",
    "Element",
    "MergeTree",
    "OnlineEngine",
    "Ordering",
    "QueryInterval",
    "QueryStats",
    "SelectionTrace",
    "SortedView",
    "TrimResult",
    "USortedArray",
    "Workload",
    "build",
    "canonical_cover",
    "compare",
    "decompose",
    "equal_decomposition",
    "generate",
    "marker_ranks",
    "median_rank",
    "merge_usorted",
    "multi_select_via_reduction",
    "oracle_median",
    "query_offline",
    "query_online",
    "query_online_known_k",
    "query_slow",
    "select",
    "select_from_sorted",
    "select_from_sorted_fast",
    "trim_usorted",
    "u_sort",
    "validate_usorted",
]
