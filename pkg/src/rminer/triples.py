"""Shallow Subject-Verb-Object triple extraction.

Deliberately rule-based: clauses split on punctuation and conjunctions, the
verb found from a closed word list, subject and object taken as the raw
spans around it. Good enough to spot decision clauses; not a parser.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

# Copulas, auxiliaries, modals, and common decision/discussion verbs.
VERB_WORDS = frozenset("""
    is are was were am be been being
    has have had do does did
    will would can could shall should may might must
    reach reaches reached accept accepts accepted reject rejects rejected
    approve approves approved agree agrees agreed disagree disagrees disagreed
    decide decides decided pronounce pronounces pronounced vote votes voted
    support supports supported oppose opposes opposed object objects objected
    suggest suggests suggested propose proposes proposed
    withdraw withdrew withdrawn defer defers deferred
    seem seems seemed appear appears appeared
    say says said speak speaks spoke write writes wrote
    go goes went fail fails failed become becomes became
    remain remains remained get gets got take takes took
    prefer prefers preferred favor favors favored favour favours favoured
    think thinks thought believe believes believed feel feels felt
    want wants wanted need needs needed
""".split())

_CONJUNCTIONS = (
    "and", "but", "or", "nor", "so", "because", "since", "although",
    "though", "while", "whereas", "then", "yet", "if", "when", "unless",
    "until", "after", "before",
)

# Words dropped from the front of a clause before looking for the subject.
_LEADING_FILLER = frozenset(_CONJUNCTIONS) | {"as", "also", "that", "which", "who"}

_CLAUSE_SPLIT_RE = re.compile(
    r"[,;:]|\s+(?:" + "|".join(_CONJUNCTIONS) + r")\s+",
    re.IGNORECASE,
)
_EDGE_PUNCT = " \t\"'`.,;:!?()[]{}"


@dataclass(frozen=True)
class Triple:
    subject: str
    verb: str
    object: str


def _clean_token(token: str) -> str:
    return token.strip(_EDGE_PUNCT).lower()


def _clean_span(tokens: list[str]) -> str:
    return " ".join(tokens).strip(_EDGE_PUNCT)


def extract_triples(text: str) -> list[Triple]:
    """Extract one (subject, verb, object) per clause that has a known verb."""
    triples: list[Triple] = []
    for clause in _CLAUSE_SPLIT_RE.split(text):
        tokens = clause.split()
        while tokens and _clean_token(tokens[0]) in _LEADING_FILLER:
            tokens.pop(0)
        verb_at = None
        for i, token in enumerate(tokens):
            if _clean_token(token) in VERB_WORDS:
                verb_at = i
                break
        if verb_at is None or verb_at == 0:
            continue
        subject = _clean_span(tokens[:verb_at])
        if not subject:
            continue
        triples.append(Triple(
            subject=subject,
            verb=_clean_token(tokens[verb_at]),
            object=_clean_span(tokens[verb_at + 1:]),
        ))
    return triples


def triple_matches_decision(triple: Triple, decision_terms) -> bool:
    """True when any decision term occurs word-bounded in any triple slot."""
    alts = [re.escape(t.lower()).replace(r"\ ", r"\s+") for t in decision_terms if t]
    if not alts:
        return False
    regex = re.compile(r"(?<!\w)(?:" + "|".join(alts) + r")(?!\w)")
    for part in (triple.subject, triple.verb, triple.object):
        if regex.search(part.lower()):
            return True
    return False
