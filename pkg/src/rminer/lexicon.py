"""Term-type lexicon: phrase tables, pattern scores, negation and cue matching.

The lexicon is replaceable configuration: a JSON file defines the six term
types, the pattern score table, negation terms, the decision-term list used
for triple matching, decision heading terms, and the message-cue rules for
the four explicit-rationale message classes. A default lexicon ships as
package data.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

TERM_TYPES = (
    "proposal_identifier",
    "state",
    "reason_identifier",
    "entity",
    "decision_term",
    "support_term",
)

SAMCER_CLASSES = (
    "author_request",
    "bdfl_review",
    "bdfl_pronouncement",
    "member_reflection",
)

MAX_PATTERN_SCORE = 0.9

# Word-bounded "PEP 123" style mention; also counts as a proposal_identifier.
_PEP_REF_RE = re.compile(r"\bPEP[ -]?\d+\b", re.IGNORECASE)

DEFAULT_NEGATION_TERMS = (
    "may", "not", "should not", "shouldn't", "won't", "cannot", "can't",
    "don't", "doesn't", "didn't", "never",
)


class LexiconError(ValueError):
    """Invalid lexicon content."""


def _phrase_regex(phrases) -> re.Pattern | None:
    """One alternation over all phrases, word-bounded, whitespace-flexible."""
    cleaned = sorted({p for p in phrases if p}, key=len, reverse=True)
    if not cleaned:
        return None
    alts = []
    for phrase in cleaned:
        words = phrase.split()
        alts.append(r"\s+".join(re.escape(w) for w in words))
    return re.compile(r"(?<!\w)(?:" + "|".join(alts) + r")(?!\w)")


def _norm_text(text: str) -> str:
    return text.replace("’", "'").casefold()


@dataclass(frozen=True)
class TermPattern:
    required_types: frozenset
    score: float


@dataclass(frozen=True)
class SamcerRule:
    samcer_class: str
    roles: tuple | None  # None means any author role
    cues: tuple


class Lexicon:
    def __init__(self, term_types: dict, patterns: list, negation_terms: list,
                 decision_terms: list, decision_heading_terms: list,
                 samcer_rules: list | None = None):
        self.term_types = {k: [p.lower() for p in v] for k, v in term_types.items()}
        self.patterns = list(patterns)
        self.negation_terms = [p.lower() for p in negation_terms]
        self.decision_terms = [p.lower() for p in decision_terms]
        self.decision_heading_terms = [p.lower() for p in decision_heading_terms]
        self.samcer_rules = list(samcer_rules or [])
        self._validate()
        self._type_res = {
            t: _phrase_regex(phrases) for t, phrases in self.term_types.items()
        }
        self._negation_re = _phrase_regex(self.negation_terms)
        self._decision_re = _phrase_regex(self.decision_terms)
        self._heading_re = _phrase_regex(self.decision_heading_terms)
        self._samcer_res = [
            (rule, _phrase_regex(rule.cues)) for rule in self.samcer_rules
        ]

    def _validate(self) -> None:
        for t, phrases in self.term_types.items():
            if not isinstance(t, str) or not t:
                raise LexiconError(f"bad term type name: {t!r}")
            for p in phrases:
                if not p or p != p.strip():
                    raise LexiconError(f"term type {t}: bad phrase {p!r}")
        for pat in self.patterns:
            unknown = pat.required_types - set(self.term_types)
            if unknown:
                raise LexiconError(
                    f"pattern references undefined term types: {sorted(unknown)}")
            if not pat.required_types:
                raise LexiconError("pattern with empty required_types")
            if not 0 <= pat.score <= MAX_PATTERN_SCORE:
                raise LexiconError(
                    f"pattern score {pat.score} outside [0, {MAX_PATTERN_SCORE}]")
        for rule in self.samcer_rules:
            if rule.samcer_class not in SAMCER_CLASSES:
                raise LexiconError(f"unknown message class: {rule.samcer_class}")
            if not rule.cues:
                raise LexiconError(f"{rule.samcer_class}: rule without cues")

    # --- matching ------------------------------------------------------------

    def match_term_types(self, text: str) -> set:
        """Term types whose phrases occur word-bounded in the text."""
        found = set()
        norm = _norm_text(text)
        for t, regex in self._type_res.items():
            if regex is not None and regex.search(norm):
                found.add(t)
        if "proposal_identifier" in self.term_types and _PEP_REF_RE.search(text):
            found.add("proposal_identifier")
        return found

    def best_pattern_score(self, types) -> float:
        types = set(types)
        best = 0.0
        for pat in self.patterns:
            if pat.required_types <= types and pat.score > best:
                best = pat.score
        return best

    def detect_negation(self, text: str) -> bool:
        return bool(self._negation_re and self._negation_re.search(_norm_text(text)))

    def matches_decision_terms(self, text: str) -> bool:
        return bool(self._decision_re and self._decision_re.search(_norm_text(text)))

    def contains_heading_term(self, text: str) -> bool:
        return bool(self._heading_re and self._heading_re.search(_norm_text(text)))

    def match_samcer(self, subject: str, body: str, role: str) -> str | None:
        """First message class whose role constraint and cues both match."""
        haystack = _norm_text(subject + "\n" + body)
        for rule, regex in self._samcer_res:
            if rule.roles is not None and role not in rule.roles:
                continue
            if regex is not None and regex.search(haystack):
                return rule.samcer_class
        return None

    # --- construction ----------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "Lexicon":
        try:
            patterns = [
                TermPattern(frozenset(p["required_types"]), float(p["score"]))
                for p in data.get("patterns", [])
            ]
            rules = [
                SamcerRule(
                    samcer_class=r["class"],
                    roles=tuple(r["roles"]) if r.get("roles") is not None else None,
                    cues=tuple(r["cues"]),
                )
                for r in data.get("samcer_rules", [])
            ]
            return cls(
                term_types=data.get("term_types", {}),
                patterns=patterns,
                negation_terms=data.get("negation_terms", list(DEFAULT_NEGATION_TERMS)),
                decision_terms=data.get("decision_terms", []),
                decision_heading_terms=data.get("decision_heading_terms", []),
                samcer_rules=rules,
            )
        except (KeyError, TypeError) as exc:
            raise LexiconError(f"malformed lexicon data: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise LexiconError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def default(cls) -> "Lexicon":
        ref = resources.files("rminer").joinpath("data/default_lexicon.json")
        return cls.from_dict(json.loads(ref.read_text(encoding="utf-8")))


def load_lexicon(path=None) -> Lexicon:
    return Lexicon.default() if path is None else Lexicon.from_file(path)


# Module-level forms of the matching operations.

def match_term_types(text: str, lexicon: Lexicon) -> set:
    return lexicon.match_term_types(text)


def best_pattern_score(types, lexicon: Lexicon) -> float:
    return lexicon.best_pattern_score(types)


def detect_negation(text: str, negation_terms=None) -> bool:
    regex = _phrase_regex(
        [t.lower() for t in (negation_terms or DEFAULT_NEGATION_TERMS)])
    return bool(regex and regex.search(_norm_text(text)))
