"""Sentence-based and message-based candidate ranking."""
from __future__ import annotations

from dataclasses import dataclass, field

from sklearn.base import BaseEstimator, TransformerMixin

from .heuristics import ScoredSentence, group_by_pep

SCHEMES = ("sbs", "mbs")


@dataclass
class RankedEntry:
    rank: int
    score: float
    message_id: str
    sentence_index: int | None = None          # sentence ranking only
    member_sentence_indices: list[int] | None = None  # message ranking only
    text: str | None = None

    def to_record(self) -> dict:
        rec = {"rank": self.rank, "score": self.score, "message_id": self.message_id}
        if self.sentence_index is not None:
            rec["sentence_index"] = self.sentence_index
        if self.member_sentence_indices is not None:
            rec["member_sentence_indices"] = self.member_sentence_indices
        if self.text is not None:
            rec["text"] = self.text
        return rec


@dataclass
class RankedList:
    pep: int
    scheme: str
    entries: list[RankedEntry] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "pep": self.pep,
            "scheme": self.scheme,
            "entries": [e.to_record() for e in self.entries],
        }


def _date_key(s: ScoredSentence):
    if s.message_date is None:
        return (1, "")
    return (0, s.message_date.isoformat())


def candidate_sort_key(s: ScoredSentence):
    """Score descending; ties to the earlier message, then id, then position."""
    return (-s.fs, _date_key(s), s.message_id, s.sentence_index)


def rank_sbs(scored: list[ScoredSentence], pep: int | None = None,
             min_score: float = 0.0) -> RankedList:
    """Rank individual sentences; only scores above the threshold qualify."""
    if pep is None:
        pep = scored[0].pep if scored else 0
    candidates = sorted(
        (s for s in scored if s.fs > min_score), key=candidate_sort_key)
    return RankedList(pep=pep, scheme="sbs", entries=[
        RankedEntry(rank=i, score=s.fs, message_id=s.message_id,
                    sentence_index=s.sentence_index, text=s.text)
        for i, s in enumerate(candidates, start=1)
    ])


def rank_mbs(scored: list[ScoredSentence], pep: int | None = None,
             min_score: float = 0.0) -> RankedList:
    """Rank messages by their best sentence.

    Messages appear in the order their first member shows up in the sentence
    ranking, which makes the message rank of any sentence's message never
    worse than the sentence's own rank. Each entry lists all its qualifying
    sentences (best first) for display highlighting.
    """
    if pep is None:
        pep = scored[0].pep if scored else 0
    candidates = sorted(
        (s for s in scored if s.fs > min_score), key=candidate_sort_key)
    order: list[str] = []
    members: dict[str, list[ScoredSentence]] = {}
    for s in candidates:
        if s.message_id not in members:
            order.append(s.message_id)
            members[s.message_id] = []
        members[s.message_id].append(s)
    return RankedList(pep=pep, scheme="mbs", entries=[
        RankedEntry(
            rank=i,
            score=members[mid][0].fs,  # members kept in sentence-rank order
            message_id=mid,
            member_sentence_indices=[s.sentence_index for s in members[mid]],
        )
        for i, mid in enumerate(order, start=1)
    ])


def rank_corpus(scored: list[ScoredSentence], scheme: str = "both",
                min_score: float = 0.0) -> dict[int, dict[str, RankedList]]:
    """Per-proposal rankings for one or both schemes."""
    if scheme not in SCHEMES + ("both",):
        raise ValueError(f"unknown scheme: {scheme!r}")
    wanted = SCHEMES if scheme == "both" else (scheme,)
    rankings: dict[int, dict[str, RankedList]] = {}
    for pep, sentences in sorted(group_by_pep(scored).items()):
        per_scheme = {}
        if "sbs" in wanted:
            per_scheme["sbs"] = rank_sbs(sentences, pep, min_score)
        if "mbs" in wanted:
            per_scheme["mbs"] = rank_mbs(sentences, pep, min_score)
        rankings[pep] = per_scheme
    return rankings


class RationaleRanker(BaseEstimator, TransformerMixin):
    """Estimator wrapper over the two ranking schemes."""

    def __init__(self, scheme: str = "both", min_score: float = 0.0):
        self.scheme = scheme
        self.min_score = min_score

    def fit(self, X=None, y=None):
        if self.scheme not in SCHEMES + ("both",):
            raise ValueError(f"unknown scheme: {self.scheme!r}")
        if self.min_score < 0:
            raise ValueError("min_score must be >= 0")
        self.schemes_ = SCHEMES if self.scheme == "both" else (self.scheme,)
        return self

    def transform(self, X: list[ScoredSentence]) -> dict[int, dict[str, RankedList]]:
        if not hasattr(self, "schemes_"):
            self.fit()
        return rank_corpus(X, self.scheme, self.min_score)
