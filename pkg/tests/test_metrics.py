"""Removal metrics against scripted probability tables.

The stubs return fixed probabilities keyed by exactly which positions
are removed, so every expected value below is hand-computable and any
deviation from the documented removal protocol trips the stub's
unscripted-pattern assertion.
"""

from __future__ import annotations

import math

import pytest

from minfeat.errors import InputError, InternalError
from minfeat.metrics import (
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
from stubs import ScriptedModel, scripted_instance

PAIRS = RemovalProtocol(PAIR_MODE)
WORDS = RemovalProtocol(WORD_MODE)


class TestProtocol:
    def test_modes_validated(self):
        with pytest.raises(InputError):
            RemovalProtocol("tokens")

    def test_truncation_budget(self):
        assert PAIRS.k_for(10, 5) == 1  # floor(0.1 * 10) = 1
        assert PAIRS.k_for(30, 5) == 3
        assert PAIRS.k_for(30, 2) == 2  # clamped to the set size
        assert PAIRS.k_for(5, 9) == 1  # short input still removes one
        assert PAIRS.k_for(200, 999) == 20

    def test_top_elements_order(self):
        rs = RemovalSet(mode=WORD_MODE, elements=(4, 2, 9), scores=(1.0, 3.0, 1.0))
        assert rs.top_elements(2) == (2, 4)  # score first, then lower element
        assert rs.top_elements(99) == (2, 4, 9)

    def test_element_score_mismatch_rejected(self):
        with pytest.raises(InputError):
            RemovalSet(mode=WORD_MODE, elements=(1, 2), scores=(0.5,))


class TestComprehensiveness:
    def test_hand_traced_drop(self):
        model = ScriptedModel({(): (0.9, 0.1), (2, 5): (0.6, 0.4)})
        inst = scripted_instance(10)
        removal = RemovalSet(mode=PAIR_MODE, elements=((2, 5),), scores=(1.0,))
        assert comprehensiveness(model, [inst], [removal], PAIRS) == pytest.approx(0.3, abs=1e-12)

    def test_truncates_to_top_scoring_pair(self):
        # Length 10 gives budget K=1, so only the best-scored pair is removed.
        model = ScriptedModel({(): (0.8, 0.2), (0, 1): (0.5, 0.5)})
        inst = scripted_instance(10)
        removal = RemovalSet(mode=PAIR_MODE, elements=((2, 3), (0, 1)), scores=(1.0, 2.0))
        assert comprehensiveness(model, [inst], [removal], PAIRS) == pytest.approx(0.3, abs=1e-12)

    def test_empty_set_contributes_zero(self):
        model = ScriptedModel({(): (0.9, 0.1), (1,): (0.4, 0.6)})
        insts = [scripted_instance(10), scripted_instance(10)]
        removals = [
            RemovalSet(mode=WORD_MODE, elements=(1,), scores=(1.0,)),
            RemovalSet(mode=WORD_MODE, elements=(), scores=()),
        ]
        # (0.9 - 0.4 + 0) / 2
        assert comprehensiveness(model, insts, removals, WORDS) == pytest.approx(0.25, abs=1e-12)

    def test_corpus_shape_validated(self):
        model = ScriptedModel({(): (0.9, 0.1)})
        with pytest.raises(InputError):
            comprehensiveness(model, [], [], PAIRS)
        with pytest.raises(InputError):
            comprehensiveness(model, [scripted_instance(5)], [], PAIRS)


class TestLogOdds:
    def test_hand_traced_log_ratio(self):
        model = ScriptedModel({(): (0.9, 0.1), (2, 5): (0.6, 0.4)})
        inst = scripted_instance(10)
        removal = RemovalSet(mode=PAIR_MODE, elements=((2, 5),), scores=(1.0,))
        assert log_odds(model, [inst], [removal], PAIRS) == pytest.approx(-0.405465, abs=1e-6)

    def test_zero_probability_floored(self):
        model = ScriptedModel({(): (0.9, 0.1), (3,): (0.0, 1.0)})
        inst = scripted_instance(10)
        removal = RemovalSet(mode=WORD_MODE, elements=(3,), scores=(1.0,))
        lo = log_odds(model, [inst], [removal], WORDS)
        assert math.isfinite(lo)
        assert lo == pytest.approx(math.log(1e-12) - math.log(0.9), abs=1e-9)


class TestFmsPairs:
    def test_full_trace_passes(self):
        # FE: all four positions removed drives the probability to 0.4;
        # each pair restored alone lifts it back above 0.5.
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (0, 1, 2, 3): (0.4, 0.6),
                (2, 3): (0.7, 0.3),  # pair (0, 1) restored
                (0, 1): (0.8, 0.2),  # pair (2, 3) restored
            }
        )
        inst = scripted_instance(10)
        assert fms_pairs(model, [inst], [[(0, 1), (2, 3)]], t=0.5) == 1.0

    def test_essence_failure_scores_zero(self):
        model = ScriptedModel({(): (0.9, 0.1), (0, 1, 2, 3): (0.6, 0.4)})
        inst = scripted_instance(10)
        assert fms_pairs(model, [inst], [[(0, 1), (2, 3)]], t=0.5) == 0.0

    def test_single_minimality_failure_scores_zero(self):
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (0, 1, 2, 3): (0.4, 0.6),
                (2, 3): (0.7, 0.3),
                (0, 1): (0.45, 0.55),  # restoring (2, 3) is not enough
            }
        )
        inst = scripted_instance(10)
        assert fms_pairs(model, [inst], [[(0, 1), (2, 3)]], t=0.5) == 0.0

    def test_boundary_is_leq_for_essence_strict_for_minimality(self):
        # Probability exactly t passes essence but fails restoration.
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (0, 1): (0.5, 0.5),  # essence: 0.5 <= t holds
            }
        )
        inst = scripted_instance(10)
        # Single pair: restoring it brings back the full input (0.9 > t),
        # so the score hinges on essence alone.
        assert fms_pairs(model, [inst], [[(0, 1)]], t=0.5) == 1.0
        barely = ScriptedModel(
            {
                (): (0.5, 0.5),  # restored probability not strictly above t
                (0, 1): (0.4, 0.6),
            }
        )
        assert fms_pairs(barely, [inst], [[(0, 1)]], t=0.5) == 0.0

    def test_overlapping_pairs_restore_without_shared_member(self):
        # Restoring (0, 1) keeps position 1 removed because (1, 2) still
        # owns it; the scripted table pins the exact patterns probed.
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (0, 1, 2): (0.4, 0.6),  # essence for both pairs
                (1, 2): (0.45, 0.55),  # (0, 1) restored minus shared member
                (0, 1): (0.45, 0.55),  # (1, 2) restored minus shared member
            }
        )
        inst = scripted_instance(10)
        assert fms_pairs(model, [inst], [[(0, 1), (1, 2)]], t=0.5) == 0.0

    def test_empty_set_scores_zero(self):
        model = ScriptedModel({(): (0.9, 0.1)})
        inst = scripted_instance(10)
        assert fms_pairs(model, [inst], [[]], t=0.5) == 0.0

    def test_threshold_validated(self):
        model = ScriptedModel({(): (0.9, 0.1)})
        inst = scripted_instance(10)
        for t in (0.0, 1.0, -0.5):
            with pytest.raises(InputError):
                fms_pairs(model, [inst], [[(0, 1)]], t=t)

    def test_mean_over_instances(self):
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (0, 1): (0.4, 0.6),
                (2, 3): (0.6, 0.4),
            }
        )
        insts = [scripted_instance(10), scripted_instance(10)]
        # First instance passes (single pair, essence holds), second fails.
        score = fms_pairs(model, insts, [[(0, 1)], [(2, 3)]], t=0.5)
        assert score == pytest.approx(0.5, abs=1e-12)


class TestFmsWords:
    def test_word_level_trace(self):
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (1, 3): (0.3, 0.7),  # both words removed
                (3,): (0.7, 0.3),  # word 1 restored
                (1,): (0.6, 0.4),  # word 3 restored
            }
        )
        inst = scripted_instance(10)
        assert fms_words(model, [inst], [[1, 3]], t=0.5) == 1.0

    def test_one_redundant_word_fails_minimality(self):
        model = ScriptedModel(
            {
                (): (0.9, 0.1),
                (1, 3): (0.3, 0.7),
                (3,): (0.7, 0.3),
                (1,): (0.45, 0.55),  # word 3 alone does not rescue
            }
        )
        inst = scripted_instance(10)
        assert fms_words(model, [inst], [[1, 3]], t=0.5) == 0.0


class TestTopKBaseline:
    def test_selects_largest_scores(self):
        assert top_k_baseline([0.1, 0.9, 0.5, 0.7], 2) == (1, 3)

    def test_ties_prefer_lower_index(self):
        assert top_k_baseline([0.5, 0.5, 0.5], 2) == (0, 1)

    def test_k_clamped(self):
        assert top_k_baseline([1.0, 2.0], 10) == (0, 1)
        assert top_k_baseline([1.0, 2.0], 0) == ()

    def test_negative_k_rejected(self):
        with pytest.raises(InputError):
            top_k_baseline([1.0], -1)


class TestMetricsRow:
    def test_non_finite_rejected(self):
        with pytest.raises(InternalError):
            MetricsRow(method="m", lo=float("nan"), comp=0.0, fms=0.0, n=1, seed=0)
        with pytest.raises(InternalError):
            MetricsRow(method="m", lo=0.0, comp=float("inf"), fms=0.0, n=1, seed=0)

    def test_empty_aggregate_rejected(self):
        with pytest.raises(InputError):
            MetricsRow(method="m", lo=0.0, comp=0.0, fms=0.0, n=0, seed=0)
