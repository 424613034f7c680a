"""Side-by-side evaluation of explanation methods on one corpus.

Each method produces one removal set per instance; all methods are then
scored with the same comprehensiveness, log-odds, and minimality
metrics. Pair-producing methods are scored at pair granularity, plain
word rankings at word granularity.

Methods:

- cidr: the full pipeline with refinement,
- cidr-no-r: single greedy exclusion pass, no refinement,
- cidr-no-cig: refinement with beta = 0, so pairs carry no
  leave-one-out interaction component,
- ig-top2k: top 2K words by path-integral attribution,
- gradinput-top2k: top 2K words by embedding-gradient inner product,
- random: uniformly drawn word sets matched in size to cidr's word sets.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .attribution import (
    AttributionSet,
    PairScoreMap,
    cooperative_integrated_gradients,
    integrated_gradients,
)
from .errors import ConfigError, InputError
from .metrics import (
    PAIR_MODE,
    WORD_MODE,
    MetricsRow,
    RemovalProtocol,
    RemovalSet,
    comprehensiveness,
    fms_pairs,
    fms_words,
    log_odds,
    top_k_baseline,
)
from .model import Instance, Model
from .pipeline import CidrConfig, MinimalFeatureSet, cidr_without_refinement, refine

METHODS = ("cidr", "cidr-no-r", "cidr-no-cig", "ig-top2k", "gradinput-top2k", "random")

_PAIR_METHODS = ("cidr", "cidr-no-r", "cidr-no-cig")

# Stream id for the random-baseline draws, far outside the refinement
# iteration indices so the two never share a Philox key.
_RANDOM_STREAM = 1_000_003

_T = TypeVar("_T")
_R = TypeVar("_R")


def parallel_map(fn: Callable[[_T], _R], items: Iterable[_T], max_workers: int | None = None) -> list[_R]:
    """Order-preserving map over a thread pool.

    Results line up with the inputs regardless of completion order, so
    deterministic per-item functions stay deterministic overall.
    """
    items = list(items)
    if len(items) <= 1 or max_workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(fn, items))


def gradient_input_scores(model: Model, instance: Instance, target_class: int) -> np.ndarray:
    """Per-token inner product of the embedding with its gradient."""
    grads = model.input_gradient(instance.embeddings, target_class)
    return (instance.embeddings * grads).sum(axis=1)


@dataclass
class _Shared:
    """Per-instance artifacts reused across methods."""

    instance: Instance
    target: int
    attributions: AttributionSet | None = None
    pair_map: PairScoreMap | None = None
    cidr_mfs: MinimalFeatureSet | None = None


def _word_budget(n_tokens: int) -> int:
    """Word-ranking methods expose 2K candidates, K = max(1, floor(0.1 n))."""
    return min(2 * max(1, n_tokens // 10), n_tokens)


def _pair_removal(mfs: MinimalFeatureSet) -> RemovalSet:
    scores = tuple(mfs.pair_scores.records[p].cig for p in mfs.pairs)
    return RemovalSet(mode=PAIR_MODE, elements=mfs.pairs, scores=scores)


def _word_removal(indices: Sequence[int], ranking: Sequence[float]) -> RemovalSet:
    return RemovalSet(
        mode=WORD_MODE,
        elements=tuple(int(i) for i in indices),
        scores=tuple(float(ranking[i]) for i in indices),
    )


def _random_words(n_tokens: int, size: int, seed: int, index: int) -> RemovalSet:
    if size == 0:
        return RemovalSet(mode=WORD_MODE, elements=(), scores=())
    stream = np.random.Generator(
        np.random.Philox(counter=[0, 0, 0, index], key=[seed, _RANDOM_STREAM])
    )
    drawn = stream.permutation(n_tokens)[:size]
    # Earlier draws rank higher so truncation follows the draw order.
    scores = {int(pos): float(size - rank) for rank, pos in enumerate(drawn)}
    elements = tuple(sorted(scores))
    return RemovalSet(
        mode=WORD_MODE, elements=elements, scores=tuple(scores[e] for e in elements)
    )


def single_instance_metrics(
    model: Model, instance: Instance, mfs: MinimalFeatureSet, t: float
) -> tuple[float, float, float]:
    """(comp, lo, fms) for one instance under its pair explanation."""
    removal = [_pair_removal(mfs)]
    protocol = RemovalProtocol(mode=PAIR_MODE)
    comp = comprehensiveness(model, [instance], removal, protocol)
    lo = log_odds(model, [instance], removal, protocol)
    fms = fms_pairs(model, [instance], [mfs.pairs], t)
    return comp, lo, fms


def evaluate_methods(
    model: Model,
    instances: Sequence[Instance],
    methods: Sequence[str],
    config: CidrConfig,
    max_workers: int | None = None,
) -> list[MetricsRow]:
    """Score each requested method over the whole corpus.

    Returns one row per method, in request order. Pair scores are
    computed once per instance and shared: the beta = 0 variant is an
    exact recombination of the stored components, and the random baseline
    reads its set sizes from the cidr result.
    """
    unknown = sorted(set(methods) - set(METHODS))
    if unknown:
        raise ConfigError(f"unknown methods {unknown}; valid names are {list(METHODS)}")
    if not methods:
        raise ConfigError("at least one method is required")
    if not instances:
        raise InputError("evaluation needs at least one instance")

    need_pairs = any(m in methods for m in _PAIR_METHODS) or "random" in methods
    need_cidr = "cidr" in methods or "random" in methods
    need_attr = need_pairs or "ig-top2k" in methods

    def prepare(item: tuple[int, Instance]) -> _Shared:
        _, instance = item
        shared = _Shared(instance=instance, target=model.predicted_class(instance.embeddings))
        if need_pairs:
            shared.pair_map = cooperative_integrated_gradients(
                model, instance, shared.target, config.beta, config.steps
            )
            shared.attributions = shared.pair_map.attributions
        elif need_attr:
            shared.attributions = integrated_gradients(model, instance, shared.target, config.steps)
        if need_cidr:
            shared.cidr_mfs = refine(model, instance, config, shared.pair_map)
        return shared

    shared_list = parallel_map(prepare, enumerate(instances), max_workers=max_workers)

    rows: list[MetricsRow] = []
    for method in methods:
        removal_sets: list[RemovalSet] = []
        fms_sets: list = []
        for index, shared in enumerate(shared_list):
            instance = shared.instance
            if method == "cidr":
                mfs = shared.cidr_mfs
            elif method == "cidr-no-r":
                mfs = cidr_without_refinement(model, instance, config, shared.pair_map)
            elif method == "cidr-no-cig":
                zero_beta = replace(config, beta=0.0)
                mfs = refine(model, instance, zero_beta, shared.pair_map.with_beta(0.0))
            elif method == "ig-top2k":
                scores = shared.attributions.scores
                words = top_k_baseline(scores, _word_budget(len(instance)))
                removal_sets.append(_word_removal(words, scores))
                fms_sets.append(words)
                continue
            elif method == "gradinput-top2k":
                scores = gradient_input_scores(model, instance, shared.target)
                words = top_k_baseline(scores, _word_budget(len(instance)))
                removal_sets.append(_word_removal(words, scores))
                fms_sets.append(words)
                continue
            else:  # random
                size = len(shared.cidr_mfs.words)
                removal = _random_words(len(instance), size, config.seed, index)
                removal_sets.append(removal)
                fms_sets.append(removal.elements)
                continue
            removal_sets.append(_pair_removal(mfs))
            fms_sets.append(mfs.pairs)

        if method in _PAIR_METHODS:
            protocol = RemovalProtocol(mode=PAIR_MODE)
            fms = fms_pairs(model, instances, fms_sets, config.t)
        else:
            protocol = RemovalProtocol(mode=WORD_MODE)
            fms = fms_words(model, instances, fms_sets, config.t)
        rows.append(
            MetricsRow(
                method=method,
                lo=log_odds(model, instances, removal_sets, protocol),
                comp=comprehensiveness(model, instances, removal_sets, protocol),
                fms=fms,
                n=len(instances),
                seed=config.seed,
            )
        )
    return rows
