"""0/1 knapsack solvers for the pair-exclusion step.

Items are token pairs, weights are their cooperative scores, values are
the sampled perturbations, and the capacity is the attribution upper
bound. Real weights are quantized to integers before the dynamic program
runs; see quantize for the rounding rules.

Tie-break shared by the exact solvers: among equal-value selections,
prefer not selecting an item. Applied per item from the last to the
first during backtracking, this picks the selection whose membership
bitmask is smallest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import ConfigError, InputError

# Guard for the DP table: items x (capacity+1) cells.
MAX_TABLE_CELLS = 200_000_000

BRUTEFORCE_MAX_ITEMS = 20


@dataclass(frozen=True)
class KnapsackInstance:
    """Real-weighted instance as produced by the exclusion transformation."""

    items: tuple[Hashable, ...]
    weights: tuple[float, ...]
    values: tuple[float, ...]
    capacity: float
    digits: int

    def __post_init__(self) -> None:
        n = len(self.items)
        if len(self.weights) != n or len(self.values) != n:
            raise InputError("items, weights, and values must have equal length")
        if len(set(self.items)) != n:
            raise InputError("item ids must be distinct")
        if any(w <= 0 for w in self.weights):
            raise InputError("weights must be strictly positive")
        if any(v <= 0 for v in self.values):
            raise InputError("values must be strictly positive")
        if self.capacity < 0:
            raise InputError("capacity must be non-negative")
        if self.digits < 0:
            raise InputError("quantization digits must be non-negative")


@dataclass(frozen=True)
class IntegerKnapsackInstance:
    """Quantized instance: integer weights >= 1 and integer capacity >= 0."""

    items: tuple[Hashable, ...]
    weights: tuple[int, ...]
    values: tuple[float, ...]
    capacity: int

    def __post_init__(self) -> None:
        n = len(self.items)
        if len(self.weights) != n or len(self.values) != n:
            raise InputError("items, weights, and values must have equal length")
        if len(set(self.items)) != n:
            raise InputError("item ids must be distinct")
        if any(w < 1 for w in self.weights):
            raise InputError("integer weights must be >= 1")
        if self.capacity < 0:
            raise InputError("capacity must be non-negative")


@dataclass(frozen=True)
class KnapsackSolution:
    """Selected item ids plus the achieved value and weight."""

    selected: tuple[Hashable, ...]
    value: float
    weight: int


def quantize(instance: KnapsackInstance) -> IntegerKnapsackInstance:
    """Scale weights and capacity by 10**digits and round to integers.

    Weights round to nearest (half away from zero); the capacity is
    floored, so quantization never admits a selection the real capacity
    would reject by more than the documented slack. Weights that round to
    zero are clamped to 1.
    """
    scale = 10**instance.digits
    weights = tuple(max(1, int(np.floor(w * scale + 0.5))) for w in instance.weights)
    capacity = int(np.floor(instance.capacity * scale))
    cells = (len(instance.items) + 1) * (capacity + 1)
    if cells > MAX_TABLE_CELLS:
        raise ConfigError(
            f"quantized capacity {capacity} needs {cells} table cells "
            f"(limit {MAX_TABLE_CELLS}); lower the quantization digits"
        )
    return IntegerKnapsackInstance(
        items=instance.items, weights=weights, values=instance.values, capacity=capacity
    )


def solve_dp(instance: IntegerKnapsackInstance) -> KnapsackSolution:
    """Exact maximum-value selection by dynamic programming.

    Row recurrence: best(i, c) = max(best(i-1, c), best(i-1, c - w_i) + v_i).
    The selection is reconstructed by backtracking the take table rather
    than collecting items while filling rows, so it always corresponds to
    the optimal final cell. Equal-value comparisons keep the item out.
    """
    n = len(instance.items)
    capacity = instance.capacity
    if n == 0 or capacity == 0:
        return KnapsackSolution(selected=(), value=0.0, weight=0)

    best = np.zeros(capacity + 1, dtype=np.float64)
    take = np.zeros((n, capacity + 1), dtype=bool)
    for i in range(n):
        w = instance.weights[i]
        v = instance.values[i]
        if w > capacity:
            continue
        candidate = best[: capacity + 1 - w] + v
        improved = candidate > best[w:]
        take[i, w:] = improved
        best[w:] = np.where(improved, candidate, best[w:])

    selected: list[Hashable] = []
    value = 0.0
    weight = 0
    c = capacity
    for i in range(n - 1, -1, -1):
        if take[i, c]:
            selected.append(instance.items[i])
            value += instance.values[i]
            weight += instance.weights[i]
            c -= instance.weights[i]
    selected.reverse()
    return KnapsackSolution(selected=tuple(selected), value=value, weight=weight)


def solve_bruteforce(instance: IntegerKnapsackInstance) -> KnapsackSolution:
    """Exhaustive oracle over all subsets, same tie-break as solve_dp.

    Refuses instances above 20 items. Subset index bit k set means item k
    selected; among equal-value feasible subsets the smallest index wins,
    which matches the prefer-not-selecting backtrack.
    """
    n = len(instance.items)
    if n > BRUTEFORCE_MAX_ITEMS:
        raise InputError(f"brute force refuses more than {BRUTEFORCE_MAX_ITEMS} items, got {n}")

    subset_weight = np.zeros(1, dtype=np.int64)
    subset_value = np.zeros(1, dtype=np.float64)
    for k in range(n):
        subset_weight = np.concatenate([subset_weight, subset_weight + instance.weights[k]])
        subset_value = np.concatenate([subset_value, subset_value + instance.values[k]])

    feasible = subset_weight <= instance.capacity
    values = np.where(feasible, subset_value, -np.inf)
    # argmax returns the first (smallest) index among ties
    best_mask = int(np.argmax(values))
    selected = tuple(instance.items[k] for k in range(n) if best_mask >> k & 1)
    return KnapsackSolution(
        selected=selected,
        value=float(subset_value[best_mask]),
        weight=int(subset_weight[best_mask]),
    )


def solve_greedy(pairs: Sequence[tuple[Hashable, float]], bound: float) -> tuple[Hashable, ...]:
    """Accumulate items in decreasing score order while the sum stays below the bound.

    The check precedes each addition: an item is admitted whenever the
    running sum of already-admitted scores is still < bound, even if
    adding it overshoots. Score ties fall back to ascending item id. A
    non-positive bound admits nothing; an infinite bound admits everything.
    """
    for _, score in pairs:
        if not np.isfinite(score):
            raise InputError("greedy scores must be finite")
    ordered = sorted(pairs, key=lambda kv: (-kv[1], kv[0]))
    selected: list[Hashable] = []
    total = 0.0
    for item, score in ordered:
        if not total < bound:
            break
        selected.append(item)
        total += score
    return tuple(selected)
