import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phrasemem.bonus import (Ablation, BonusConfig, ContractError, StepStats,
                             bonus_values, phrase_attention, rescore, sigmoid, softmax)
from phrasemem.candidate_index import Origin, SourceSpan
from phrasemem.recommender import Match, Recommendation
from phrasemem.synthetic import entry


def span(start, end, sentence="a b c d e f".split()):
    return SourceSpan(start, end, tuple(sentence[start:end]))


def rec(word, *origins):
    return Recommendation(word, tuple(Match(o, 1) for o in origins))


def test_uniform_attention_partial_span():
    # (1/4 + 1/4 + 1/4) / 3
    expected = float(Fraction(3, 4) / 3)
    assert phrase_attention([0.25] * 4, span(0, 3)) == pytest.approx(expected, abs=1e-12)


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8))
def test_whole_sentence_span(raw):
    attn = np.array(raw) / sum(raw)
    n = len(attn)
    assert phrase_attention(attn, span(0, n, ["w"] * n)) == pytest.approx(1 / n, abs=1e-12)


def test_one_hot_attention():
    assert phrase_attention([0.0, 1.0, 0.0], span(0, 2)) == pytest.approx(0.5, abs=1e-12)


def test_span_out_of_range():
    with pytest.raises(ContractError):
        phrase_attention([0.5, 0.5], span(1, 3))


def settled_recs():
    src = "ta dingju zai".split()
    sp = SourceSpan(0, 3, tuple(src))
    return [rec("settled", Origin(entry("ta dingju zai", "he settled in", 0.6), sp),
                Origin(entry("ta dingju zai", "he settled down", 0.4), sp))]


def test_settled_bonus_is_one_third():
    v = bonus_values(settled_recs(), [1 / 3] * 3)
    expected = float(Fraction(1, 3) * Fraction(6, 10) + Fraction(1, 3) * Fraction(4, 10))
    assert v["settled"] == pytest.approx(expected, abs=1e-12)


def test_attention_outside_spans_gives_zero():
    o = Origin(entry("a", "x", 0.9), span(0, 1))
    assert bonus_values([rec("x", o)], [0.0, 1.0]) == {"x": 0.0}


def test_upper_bound_case():
    o = Origin(entry("b", "x", 1.0), span(1, 2))
    assert bonus_values([rec("x", o)], [0.0, 1.0, 0.0]) == {"x": 1.0}


def test_dedup_flag_counts_origin_once():
    o = Origin(entry("a", "x x", 0.5), span(0, 1))
    r = Recommendation("x", (Match(o, 0), Match(o, 1)))
    assert bonus_values([r], [1.0]) == {"x": 1.0}
    assert bonus_values([r], [1.0], dedup=True) == {"x": 0.5}


def random_origins(rng, n_src, k):
    out = []
    for _ in range(k):
        s = rng.randrange(n_src)
        e = rng.randint(s + 1, n_src)
        out.append(Origin(entry(" ".join("w" * (e - s)), "x", rng.uniform(0.01, 1)),
                          SourceSpan(s, e, ("w",) * (e - s))))
    return out


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_bonus_linear_and_bounded(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    attn = np.array([rng.random() + 1e-3 for _ in range(n)])
    attn /= attn.sum()
    a, b = random_origins(rng, n, rng.randint(1, 4)), random_origins(rng, n, rng.randint(1, 4))
    va = bonus_values([rec("x", *a)], attn)["x"]
    vb = bonus_values([rec("x", *b)], attn)["x"]
    vab = bonus_values([rec("x", *(a + b))], attn)["x"]
    assert vab == pytest.approx(va + vb, abs=1e-12)
    assert 0 <= vab <= sum(o.p_pht for o in a + b) + 1e-12
    for o in a + b:
        assert 0 <= phrase_attention(attn, o.span) <= 1


VOCAB = {"a": 0, "b": 1, "c": 2}


def test_empty_bonus_map_is_plain_softmax():
    scores = np.array([1.0, -2.0, 0.5])
    np.testing.assert_array_equal(rescore(scores, {}, BonusConfig(), VOCAB), softmax(scores))


def test_logit_scaling_factor():
    scores = np.array([2.0, 1.0, 0.5])
    cfg = BonusConfig(lam=0.5)
    out = rescore(scores, {"a": 1 / 3}, cfg, VOCAB)
    scaled = scores.copy()
    scaled[0] *= 1 + 1 / 6
    np.testing.assert_allclose(out, softmax(scaled), atol=1e-15)


def test_three_word_high_precision_oracle():
    mpmath.mp.dps = 50
    scores = [1.3, -0.7, 2.1]
    bonuses = {"a": 0.4, "c": 0.25}
    lam = 0.7
    logits = [mpmath.mpf(s) * (1 + mpmath.mpf(lam) * mpmath.mpf(bonuses.get(w, 0)))
              for w, s in zip("abc", scores)]
    z = mpmath.fsum(mpmath.exp(l) for l in logits)
    expected = [float(mpmath.exp(l) / z) for l in logits]
    got = rescore(np.array(scores), bonuses, BonusConfig(lam=lam), VOCAB)
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-9)


def test_disabled_ablation_is_identity():
    scores = np.array([1.0, 2.0, 3.0])
    out = rescore(scores, {"a": 0.9}, BonusConfig(ablation=Ablation.BASELINE), VOCAB)
    np.testing.assert_array_equal(out, softmax(scores))


def test_non_finite_scores_rejected():
    with pytest.raises(ContractError):
        rescore(np.array([1.0, np.nan, 0.0]), {}, BonusConfig(), VOCAB)


def test_oov_and_negative_logit_counters():
    stats = StepStats()
    rescore(np.array([1.0, -1.0, 0.0]), {"a": 0.5, "b": 0.5, "zz": 0.5},
            BonusConfig(), VOCAB, stats)
    assert stats.dropped_oov == 1
    assert stats.negative_logit_bonus == 1
    assert stats.nonzero_bonus == 2
    assert '"dropped_oov": 1' in stats.to_json()


def test_lambda_bounds():
    with pytest.raises(ValueError):
        BonusConfig(lam=1.0)
    with pytest.raises(ValueError):
        BonusConfig(lam=-0.1)
    assert 0 < sigmoid(-3.0) < sigmoid(3.0) < 1


@settings(max_examples=200)
@given(st.lists(st.floats(-20, 20), min_size=3, max_size=3),
       st.floats(0, 0.99), st.floats(0, 3), st.floats(0, 3))
def test_monotone_at_positive_logit(scores, lam, v1, v2):
    scores = np.array(scores)
    scores[0] = abs(scores[0]) + 1e-3
    lo, hi = sorted([v1, v2])
    cfg = BonusConfig(lam=lam)
    assert rescore(scores, {"a": hi}, cfg, VOCAB)[0] >= rescore(scores, {"a": lo}, cfg, VOCAB)[0] - 1e-15
