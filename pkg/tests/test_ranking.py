import random
from datetime import timedelta

import pytest
from sklearn.base import clone

from rminer.heuristics import HeuristicVector, ScoredSentence
from rminer.ranking import (
    RankedEntry,
    RationaleRanker,
    SCHEMES,
    rank_corpus,
    rank_mbs,
    rank_sbs,
)

from conftest import DECISIVE


def ss(fs, mid="m@x", idx=0, date=DECISIVE, pep=900, text="t"):
    return ScoredSentence(pep=pep, message_id=mid, message_date=date,
                          paragraph_index=0, sentence_index=idx, text=text,
                          bases={}, vector=HeuristicVector({}, fs))


# --- ordering oracle ------------------------------------------------------------

def _beats(a, b):
    """Pairwise comparator written independently of the sort key."""
    if a.fs != b.fs:
        return a.fs > b.fs
    da = (a.message_date is None,
          a.message_date.isoformat() if a.message_date else "")
    db = (b.message_date is None,
          b.message_date.isoformat() if b.message_date else "")
    if da != db:
        return da < db
    if a.message_id != b.message_id:
        return a.message_id < b.message_id
    return a.sentence_index < b.sentence_index


def selection_sort(sentences):
    pool = list(sentences)
    out = []
    while pool:
        best = pool[0]
        for s in pool[1:]:
            if _beats(s, best):
                best = s
        pool.remove(best)
        out.append(best)
    return out


def random_instance(rng):
    sentences = []
    dates = [None, DECISIVE, DECISIVE + timedelta(days=3)]
    idx = 0
    for m in range(rng.randrange(1, 5)):
        mid = f"m{m}@x"
        date = rng.choice(dates)
        for _ in range(rng.randrange(1, 6)):
            fs = rng.choice([-0.8, 0.0, 0.4, 0.9, 0.9, 1.5, 2.4])
            sentences.append(ss(fs, mid=mid, idx=idx, date=date))
            idx += 1
    rng.shuffle(sentences)
    return sentences


def test_sentence_ranking_matches_selection_sort_oracle():
    rng = random.Random(41)
    for _ in range(300):
        sentences = random_instance(rng)
        expected = [s for s in selection_sort(sentences) if s.fs > 0.0]
        ranked = rank_sbs(sentences)
        assert [(e.message_id, e.sentence_index) for e in ranked.entries] == \
            [(s.message_id, s.sentence_index) for s in expected]
        assert [e.rank for e in ranked.entries] == \
            list(range(1, len(expected) + 1))
        assert [e.score for e in ranked.entries] == [s.fs for s in expected]


def test_threshold_is_strict():
    sentences = [ss(0.0, idx=0), ss(-0.5, idx=1), ss(0.5, idx=2),
                 ss(0.7, idx=3)]
    assert [e.sentence_index for e in rank_sbs(sentences).entries] == [3, 2]
    assert rank_sbs(sentences, min_score=0.5).entries[0].sentence_index == 3
    assert len(rank_sbs(sentences, min_score=0.5).entries) == 1


def test_tie_breaks_explicit():
    earlier = ss(1.0, mid="b@x", idx=0, date=DECISIVE - timedelta(days=1))
    later = ss(1.0, mid="a@x", idx=1, date=DECISIVE)
    undated = ss(1.0, mid="c@x", idx=2, date=None)
    same_msg_later = ss(1.0, mid="b@x", idx=3,
                        date=DECISIVE - timedelta(days=1))
    ranked = rank_sbs([later, undated, same_msg_later, earlier])
    assert [e.message_id for e in ranked.entries] == \
        ["b@x", "b@x", "a@x", "c@x"]
    assert [e.sentence_index for e in ranked.entries] == [0, 3, 1, 2]


def test_higher_score_beats_earlier_date():
    a = ss(2.0, mid="new@x", idx=0, date=DECISIVE)
    b = ss(1.0, mid="old@x", idx=1, date=DECISIVE - timedelta(days=30))
    assert [e.message_id for e in rank_sbs([b, a]).entries] == \
        ["new@x", "old@x"]


def test_input_permutation_invariance():
    rng = random.Random(17)
    sentences = random_instance(rng)
    baseline = rank_sbs(sentences)
    baseline_m = rank_mbs(sentences)
    for _ in range(10):
        rng.shuffle(sentences)
        assert rank_sbs(sentences) == baseline
        assert rank_mbs(sentences) == baseline_m


# --- message ranking --------------------------------------------------------------

def test_message_rank_never_worse_than_sentence_rank():
    rng = random.Random(43)
    for _ in range(300):
        sentences = random_instance(rng)
        sbs = rank_sbs(sentences)
        mbs = rank_mbs(sentences)
        message_rank = {e.message_id: e.rank for e in mbs.entries}
        for entry in sbs.entries:
            assert message_rank[entry.message_id] <= entry.rank


def test_message_score_is_best_member():
    rng = random.Random(47)
    for _ in range(100):
        sentences = random_instance(rng)
        best = {}
        for s in sentences:
            if s.fs > 0.0:
                best[s.message_id] = max(best.get(s.message_id, 0.0), s.fs)
        for entry in rank_mbs(sentences).entries:
            assert entry.score == best[entry.message_id]
            assert entry.member_sentence_indices is not None
        assert {e.message_id for e in rank_mbs(sentences).entries} == \
            set(best)


def test_message_order_and_members_hand_example():
    # sentence ranks: A B X A B C C X -> message order A, B, X, C
    fs = [5.0, 4.5, 4.0, 3.5, 3.0, 2.5, 2.0, 1.5]
    mids = ["a@x", "b@x", "x@x", "a@x", "b@x", "c@x", "c@x", "x@x"]
    sentences = [ss(f, mid=m, idx=i) for i, (f, m) in enumerate(zip(fs, mids))]
    mbs = rank_mbs(sentences)
    assert [(e.rank, e.message_id) for e in mbs.entries] == \
        [(1, "a@x"), (2, "b@x"), (3, "x@x"), (4, "c@x")]
    x_entry = mbs.entries[2]
    assert x_entry.score == 4.0
    assert x_entry.member_sentence_indices == [2, 7]


def test_empty_and_all_below_threshold():
    assert rank_sbs([], pep=5).entries == []
    assert rank_sbs([], pep=5).pep == 5
    assert rank_mbs([ss(0.0), ss(-1.0, idx=1)]).entries == []


# --- corpus-level and estimator APIs ----------------------------------------------

def test_rank_corpus_groups_by_pep_and_scheme():
    sentences = [ss(1.0, mid="a@x", idx=0, pep=900),
                 ss(2.0, mid="b@x", idx=0, pep=901)]
    rankings = rank_corpus(sentences)
    assert sorted(rankings) == [900, 901]
    assert set(rankings[900]) == {"sbs", "mbs"}
    assert rankings[901]["sbs"].pep == 901
    assert rankings[901]["sbs"].scheme == "sbs"

    only_sbs = rank_corpus(sentences, scheme="sbs")
    assert set(only_sbs[900]) == {"sbs"}
    with pytest.raises(ValueError):
        rank_corpus(sentences, scheme="tbs")


def test_rank_corpus_min_score_threshold():
    sentences = [ss(1.0, idx=0), ss(3.0, idx=1)]
    rankings = rank_corpus(sentences, min_score=2.0)
    assert [e.sentence_index for e in rankings[900]["sbs"].entries] == [1]


def test_ranker_estimator_contract():
    ranker = RationaleRanker(scheme="sbs", min_score=0.5)
    assert clone(ranker).get_params() == ranker.get_params()
    out = ranker.fit().transform([ss(1.0), ss(0.2, idx=1)])
    assert [e.sentence_index for e in out[900]["sbs"].entries] == [0]

    with pytest.raises(ValueError):
        RationaleRanker(scheme="tbs").fit()
    with pytest.raises(ValueError):
        RationaleRanker(min_score=-1.0).fit()

    # transform self-fits when needed
    assert RationaleRanker().transform([ss(1.0)])[900].keys() == set(SCHEMES)


def test_records_serialize_shape():
    sentences = [ss(1.0, text="Hello there.")]
    sbs = rank_sbs(sentences).to_record()
    assert sbs == {"pep": 900, "scheme": "sbs", "entries": [
        {"rank": 1, "score": 1.0, "message_id": "m@x",
         "sentence_index": 0, "text": "Hello there."}]}
    mbs = rank_mbs(sentences).to_record()
    assert mbs["entries"][0] == {
        "rank": 1, "score": 1.0, "message_id": "m@x",
        "member_sentence_indices": [0]}
    assert RankedEntry(rank=1, score=2.0, message_id="m@x").to_record() == \
        {"rank": 1, "score": 2.0, "message_id": "m@x"}
