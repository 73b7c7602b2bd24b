"""The 13-component heuristic scoring engine.

Thirteen heuristics in five categories produce per-sentence base activations;
the final score is their sum after applying configured sweep deltas to the
activated components. The scorer is an sklearn-style estimator so ablation
and sweep can clone/reconfigure it, and so configuration lives in
constructor params inspectable via get_params.

Heuristic ids:
  TPCS   term pattern in the current sentence
  TPROP  term pattern in the rest of the paragraph (after the sentence)
  TPMS   term pattern in the message subject
  DFSC   day-distance from the decisive state commit (decay table)
  SLIM   sentence located in the first or last paragraph
  NT     negation term present (penalty)
  MT     message type is a proposal summary or state commit
  AR     author role (leader, delegate, proposal author, editor, core dev)
  SAMCER message belongs to one of four explicit-rationale message classes
  RMSSCM message shares its subject with an earlier pronouncement request
  RFUTE  a subject-verb-object triple contains decision terms
  DTIM   decision heading term in the sentence
  DTHP   decision heading term in the paragraph header
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from datetime import datetime

from sklearn.base import BaseEstimator, TransformerMixin

from .lexicon import Lexicon, load_lexicon
from .model import EmailMessage, LinkedCorpus, Paragraph, PepRecord, Sentence, normalize_ws
from .roles import PepRoleResolver, Roster
from .triples import extract_triples
from .validation import check_corpus

HEURISTIC_IDS = (
    "TPCS", "TPROP", "TPMS",
    "DFSC", "SLIM", "NT",
    "MT", "AR", "SAMCER",
    "RMSSCM", "RFUTE",
    "DTIM", "DTHP",
)

DEFAULT_ROLE_SCORES = {
    "bdfl": 0.9,
    "bdfl_delegate": 0.9,
    "pep_author": 0.6,
    "pep_editor": 0.5,
    "core_developer": 0.4,
    "other": 0.0,
}

# |days| <= threshold -> score; beyond the last threshold -> 0
DEFAULT_DFSC_TABLE = ((7, 0.9), (30, 0.6), (90, 0.3))

# Optimized configuration: sweep found DFSC and TPMS want +0.6.
DEFAULT_SWEEP_DELTA = {"DFSC": 0.6, "TPMS": 0.6}

SWEEP_GRID = (-0.3, 0.0, 0.3, 0.6, 0.9)
SWEEP_ELIGIBLE = frozenset({"RFUTE", "TPCS", "DFSC", "DTIM", "SAMCER", "MT", "TPMS"})

_REPLY_PREFIX_RE = re.compile(r"^(?:re|fwd?|aw)\s*:\s*", re.IGNORECASE)


class ComponentContractError(ValueError):
    """A component vector does not cover exactly the 13 heuristics."""


@dataclass
class HeuristicVector:
    components: dict[str, float]
    fs: float


@dataclass
class ScoredSentence:
    pep: int
    message_id: str
    message_date: datetime | None
    paragraph_index: int
    sentence_index: int
    text: str
    bases: dict[str, float]
    vector: HeuristicVector

    @property
    def fs(self) -> float:
        return self.vector.fs


@dataclass
class SentenceContext:
    """Everything one sentence's heuristics can see."""
    sentence: Sentence
    paragraph: Paragraph
    message: EmailMessage
    pep: PepRecord
    role: str = "other"
    message_type: str = "ordinary"
    days_from_decisive_commit: int | None = None
    is_first_or_last_paragraph: bool = False
    subject_term_types: frozenset = frozenset()
    shares_request_subject: bool = False
    samcer_class: str | None = None
    # caches filled by the batch path; recomputed from the lexicon when None
    sentence_term_types: frozenset | None = None
    remainder_term_types: frozenset | None = None


def normalize_subject(subject: str) -> str:
    """Reply/forward prefixes stripped, whitespace collapsed, casefolded."""
    s = normalize_ws(subject)
    while True:
        stripped = _REPLY_PREFIX_RE.sub("", s)
        if stripped == s:
            return s.casefold()
        s = stripped


def dfsc_score(days: int | None, table) -> float:
    if days is None:
        return 0.0
    magnitude = abs(days)
    for threshold, score in table:
        if magnitude <= threshold:
            return score
    return 0.0


def final_score(bases, sweep_delta=None, disabled=()) -> HeuristicVector:
    """Apply deltas to activated components and sum (the aggregate score).

    Deltas only touch heuristics whose base is nonzero; positive heuristics
    are floored at 0 after the delta, the negation penalty is not.
    A disabled heuristic contributes exactly 0.
    """
    if set(bases) != set(HEURISTIC_IDS):
        missing = set(HEURISTIC_IDS) - set(bases)
        extra = set(bases) - set(HEURISTIC_IDS)
        raise ComponentContractError(
            f"expected exactly 13 components; missing={sorted(missing)} "
            f"unexpected={sorted(extra)}")
    sweep_delta = sweep_delta or {}
    components: dict[str, float] = {}
    for h in HEURISTIC_IDS:
        base = float(bases[h])
        if h in disabled or base == 0.0:
            components[h] = 0.0
            continue
        value = base + float(sweep_delta.get(h, 0.0))
        if h != "NT" and value < 0.0:
            value = 0.0
        components[h] = value
    return HeuristicVector(components=components, fs=math.fsum(components.values()))


def revector(scored, sweep_delta=None, disabled=()) -> list[ScoredSentence]:
    """Recompute vectors from stored bases under a different configuration.

    Valid because components never depend on each other: ablation and sweep
    reuse the expensive text matching and only redo the arithmetic.
    """
    return [
        replace(s, vector=final_score(s.bases, sweep_delta, disabled))
        for s in scored
    ]


def _score_pep_job(args):
    scorer, pep, messages = args
    return scorer._score_pep(pep, messages, {})


class HeuristicScorer(BaseEstimator, TransformerMixin):
    """Scores every sentence of every proposal-linked message.

    fit() validates the corpus and resolves configuration (lexicon, roster,
    deltas); transform() returns a deterministic list of ScoredSentence
    ordered by (proposal, message date, sentence index).
    """

    def __init__(self, lexicon=None, roster=None, sweep_delta=None,
                 role_scores=None, dfsc_table=None, negation_penalty=-0.8,
                 slim_base=0.9, mt_base=0.9, samcer_base=0.9, rmsscm_base=0.4,
                 rfute_base=0.9, dtim_base=0.9, dthp_base=0.9,
                 disabled=None, n_jobs=None):
        self.lexicon = lexicon
        self.roster = roster
        self.sweep_delta = sweep_delta
        self.role_scores = role_scores
        self.dfsc_table = dfsc_table
        self.negation_penalty = negation_penalty
        self.slim_base = slim_base
        self.mt_base = mt_base
        self.samcer_base = samcer_base
        self.rmsscm_base = rmsscm_base
        self.rfute_base = rfute_base
        self.dtim_base = dtim_base
        self.dthp_base = dthp_base
        self.disabled = disabled
        self.n_jobs = n_jobs

    # --- configuration resolution ----------------------------------------------

    def fit(self, X: LinkedCorpus, y=None):
        check_corpus(X)
        if isinstance(self.lexicon, Lexicon):
            self.lexicon_ = self.lexicon
        else:
            self.lexicon_ = load_lexicon(self.lexicon)
        if isinstance(self.roster, Roster):
            self.roster_ = self.roster
        elif isinstance(self.roster, dict):
            self.roster_ = Roster.from_dict(self.roster)
        elif self.roster is None:
            self.roster_ = Roster()
        else:
            self.roster_ = Roster.from_file(self.roster)

        delta = DEFAULT_SWEEP_DELTA if self.sweep_delta is None else self.sweep_delta
        unknown = set(delta) - set(HEURISTIC_IDS)
        if unknown:
            raise ValueError(f"sweep_delta for unknown heuristics: {sorted(unknown)}")
        self.sweep_delta_ = {k: float(v) for k, v in delta.items()}

        scores = dict(DEFAULT_ROLE_SCORES)
        if self.role_scores:
            unknown = set(self.role_scores) - set(DEFAULT_ROLE_SCORES)
            if unknown:
                raise ValueError(f"role_scores for unknown roles: {sorted(unknown)}")
            scores.update(self.role_scores)
        self.role_scores_ = scores

        table = self.dfsc_table if self.dfsc_table is not None else DEFAULT_DFSC_TABLE
        self.dfsc_table_ = tuple(sorted((int(d), float(s)) for d, s in table))

        disabled = frozenset(self.disabled or ())
        unknown = disabled - set(HEURISTIC_IDS)
        if unknown:
            raise ValueError(f"disabled contains unknown heuristics: {sorted(unknown)}")
        self.disabled_ = disabled
        return self

    def _check_fitted(self):
        if not hasattr(self, "lexicon_"):
            raise RuntimeError("scorer is not fitted; call fit(corpus) first")

    # --- category scorers (operate on one SentenceContext) ---------------------

    def _types_of(self, text: str) -> frozenset:
        return frozenset(self.lexicon_.match_term_types(text))

    def score_term_category(self, ctx: SentenceContext) -> tuple[float, float, float]:
        types = ctx.sentence_term_types
        if types is None:
            types = self._types_of(ctx.sentence.text)
        remainder = ctx.remainder_term_types
        if remainder is None:
            later = set()
            for s in ctx.paragraph.sentences:
                if s.sentence_index > ctx.sentence.sentence_index:
                    later |= self._types_of(s.text)
            remainder = frozenset(later)
        tpcs = self.lexicon_.best_pattern_score(types)
        tprop = self.lexicon_.best_pattern_score(remainder)
        tpms = self.lexicon_.best_pattern_score(ctx.subject_term_types)
        return tpcs, tprop, tpms

    def score_proximity_category(self, ctx: SentenceContext) -> tuple[float, float, float]:
        dfsc = dfsc_score(ctx.days_from_decisive_commit, self.dfsc_table_)
        slim = self.slim_base if ctx.is_first_or_last_paragraph else 0.0
        nt = self.negation_penalty if self.lexicon_.detect_negation(ctx.sentence.text) else 0.0
        return dfsc, slim, nt

    def score_role_category(self, ctx: SentenceContext) -> tuple[float, float, float]:
        mt = self.mt_base if ctx.message_type in ("pep_summary", "state_commit") else 0.0
        ar = self.role_scores_.get(ctx.role, 0.0)
        samcer = self.samcer_base if ctx.samcer_class else 0.0
        return mt, ar, samcer

    def _rfute_hit(self, text: str) -> bool:
        for triple in extract_triples(text):
            for part in (triple.subject, triple.verb, triple.object):
                if part and self.lexicon_.matches_decision_terms(part):
                    return True
        return False

    def score_response_category(self, ctx: SentenceContext) -> tuple[float, float]:
        rmsscm = self.rmsscm_base if ctx.shares_request_subject else 0.0
        rfute = self.rfute_base if self._rfute_hit(ctx.sentence.text) else 0.0
        return rmsscm, rfute

    def score_special_category(self, ctx: SentenceContext) -> tuple[float, float]:
        dtim = self.dtim_base if self.lexicon_.contains_heading_term(ctx.sentence.text) else 0.0
        header = ctx.paragraph.header
        dthp = self.dthp_base if header and self.lexicon_.contains_heading_term(header) else 0.0
        return dtim, dthp

    def score_context(self, ctx: SentenceContext) -> HeuristicVector:
        """Score a single prepared context under the current configuration."""
        self._check_fitted()
        return final_score(self.base_components(ctx), self.sweep_delta_, self.disabled_)

    def base_components(self, ctx: SentenceContext) -> dict[str, float]:
        tpcs, tprop, tpms = self.score_term_category(ctx)
        dfsc, slim, nt = self.score_proximity_category(ctx)
        mt, ar, samcer = self.score_role_category(ctx)
        rmsscm, rfute = self.score_response_category(ctx)
        dtim, dthp = self.score_special_category(ctx)
        return {
            "TPCS": tpcs, "TPROP": tprop, "TPMS": tpms,
            "DFSC": dfsc, "SLIM": slim, "NT": nt,
            "MT": mt, "AR": ar, "SAMCER": samcer,
            "RMSSCM": rmsscm, "RFUTE": rfute,
            "DTIM": dtim, "DTHP": dthp,
        }

    # --- batch scoring ----------------------------------------------------------

    def _sentence_features(self, msg: EmailMessage, cache: dict):
        """Per-sentence lexicon features, cached per message across proposals."""
        features = cache.get(msg.message_id)
        if features is None:
            features = {}
            for para in msg.paragraphs:
                for s in para.sentences:
                    features[s.sentence_index] = (
                        self._types_of(s.text),
                        self.lexicon_.detect_negation(s.text),
                        self._rfute_hit(s.text),
                        self.lexicon_.contains_heading_term(s.text),
                    )
            cache[msg.message_id] = features
        return features

    def _score_pep(self, pep: PepRecord, messages: list[EmailMessage],
                   cache: dict) -> list[ScoredSentence]:
        resolver = PepRoleResolver(pep, self.roster_)
        decisive = pep.decisive_date()
        out: list[ScoredSentence] = []
        request_dates: dict[str, datetime] = {}
        for msg in messages:  # already date-ordered by per_pep_index
            role = resolver.role(msg)
            samcer_class = self.lexicon_.match_samcer(msg.subject, msg.body_raw, role)
            norm_subject = normalize_subject(msg.subject)
            shares = (
                msg.date is not None
                and norm_subject in request_dates
                and request_dates[norm_subject] < msg.date
            )
            if samcer_class == "author_request" and msg.date is not None:
                request_dates.setdefault(norm_subject, msg.date)

            days = None
            if decisive is not None and msg.date is not None:
                days = round((msg.date - decisive).total_seconds() / 86400)
            subject_types = self._types_of(msg.subject)
            features = self._sentence_features(msg, cache)
            n_paras = len(msg.paragraphs)

            for para in msg.paragraphs:
                first_last = para.index == 0 or para.index == n_paras - 1
                dthp_hit = bool(para.header) and self.lexicon_.contains_heading_term(
                    para.header)
                # suffix unions for the rest-of-paragraph pattern
                remainders: list[frozenset] = [frozenset()] * len(para.sentences)
                acc: frozenset = frozenset()
                for i in range(len(para.sentences) - 1, -1, -1):
                    remainders[i] = acc
                    acc = acc | features[para.sentences[i].sentence_index][0]
                for i, sentence in enumerate(para.sentences):
                    types, negated, rfute_hit, dtim_hit = features[sentence.sentence_index]
                    bases = {
                        "TPCS": self.lexicon_.best_pattern_score(types),
                        "TPROP": self.lexicon_.best_pattern_score(remainders[i]),
                        "TPMS": self.lexicon_.best_pattern_score(subject_types),
                        "DFSC": dfsc_score(days, self.dfsc_table_),
                        "SLIM": self.slim_base if first_last else 0.0,
                        "NT": self.negation_penalty if negated else 0.0,
                        "MT": self.mt_base if msg.message_type in
                              ("pep_summary", "state_commit") else 0.0,
                        "AR": self.role_scores_.get(role, 0.0),
                        "SAMCER": self.samcer_base if samcer_class else 0.0,
                        "RMSSCM": self.rmsscm_base if shares else 0.0,
                        "RFUTE": self.rfute_base if rfute_hit else 0.0,
                        "DTIM": self.dtim_base if dtim_hit else 0.0,
                        "DTHP": self.dthp_base if dthp_hit else 0.0,
                    }
                    out.append(ScoredSentence(
                        pep=pep.number,
                        message_id=msg.message_id,
                        message_date=msg.date,
                        paragraph_index=para.index,
                        sentence_index=sentence.sentence_index,
                        text=sentence.text,
                        bases=bases,
                        vector=final_score(bases, self.sweep_delta_, self.disabled_),
                    ))
        return out

    def transform(self, X: LinkedCorpus) -> list[ScoredSentence]:
        self._check_fitted()
        message_map = X.message_map()
        peps_sorted = sorted(X.per_pep_index)
        jobs = self.n_jobs
        if jobs is not None and jobs != 1 and len(peps_sorted) > 1:
            import os
            from concurrent.futures import ProcessPoolExecutor

            workers = (os.cpu_count() or 1) if jobs in (-1, 0) else int(jobs)
            items = [
                (self, X.peps[p], [message_map[m] for m in X.per_pep_index[p]])
                for p in peps_sorted
            ]
            out: list[ScoredSentence] = []
            with ProcessPoolExecutor(max_workers=workers) as executor:
                for chunk in executor.map(_score_pep_job, items):
                    out.extend(chunk)
            return out
        cache: dict = {}
        out = []
        for p in peps_sorted:
            out.extend(self._score_pep(
                X.peps[p], [message_map[m] for m in X.per_pep_index[p]], cache))
        return out

    # --- bounds -----------------------------------------------------------------

    def max_possible_fs(self) -> float:
        """Configured upper bound on any sentence's aggregate score."""
        self._check_fitted()
        max_pattern = max((p.score for p in self.lexicon_.patterns), default=0.0)
        best_bases = {
            "TPCS": max_pattern, "TPROP": max_pattern, "TPMS": max_pattern,
            "DFSC": max((s for _, s in self.dfsc_table_), default=0.0),
            "SLIM": self.slim_base,
            "NT": self.negation_penalty,
            "MT": self.mt_base,
            "AR": max(self.role_scores_.values(), default=0.0),
            "SAMCER": self.samcer_base,
            "RMSSCM": self.rmsscm_base,
            "RFUTE": self.rfute_base,
            "DTIM": self.dtim_base,
            "DTHP": self.dthp_base,
        }
        total = 0.0
        for h, base in best_bases.items():
            if h in self.disabled_ or base == 0.0:
                continue
            value = base + self.sweep_delta_.get(h, 0.0)
            if h != "NT" and value < 0.0:
                value = 0.0
            total += max(value, 0.0)
        return total


def score_corpus(corpus: LinkedCorpus, scorer: HeuristicScorer | None = None,
                 **params) -> list[ScoredSentence]:
    """Fit-and-transform convenience over a linked corpus."""
    scorer = scorer if scorer is not None else HeuristicScorer(**params)
    return scorer.fit(corpus).transform(corpus)


def group_by_pep(scored) -> dict[int, list[ScoredSentence]]:
    grouped: dict[int, list[ScoredSentence]] = {}
    for s in scored:
        grouped.setdefault(s.pep, []).append(s)
    return grouped
