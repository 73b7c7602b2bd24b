"""Assign proposal numbers to messages by number or title mention."""
from __future__ import annotations

import csv
import re
from dataclasses import replace
from pathlib import Path

from .model import Diagnostic, EmailMessage, LinkedCorpus, PepRecord, normalize_ws

# Zero padding is normalized away by the capture ("PEP 0008" -> 8).
PEP_MENTION_RE = re.compile(r"\bPEP[ -]?0*(\d+)\b", re.IGNORECASE)

# Titles shorter than this many words only link by number.
MIN_TITLE_WORDS = 3

_WORD_RE = re.compile(r"\w+")


def title_word_count(title: str) -> int:
    return len(_WORD_RE.findall(title))


def _title_pattern(title: str) -> re.Pattern | None:
    words = title.split()
    if not words:
        return None
    body = r"\s+".join(re.escape(w) for w in words)
    return re.compile(rf"(?<!\w){body}(?!\w)", re.IGNORECASE)


def find_pep_mentions(text: str) -> set[int]:
    """All proposal numbers mentioned as 'PEP N' (case-insensitive, word-bounded)."""
    return {int(m.group(1)) for m in PEP_MENTION_RE.finditer(text) if m.group(1) != "0"}


def link_messages(messages: list[EmailMessage], peps: dict[int, PepRecord]) -> LinkedCorpus:
    """Build a LinkedCorpus; input messages are not mutated.

    A message links to proposal N when subject or body mentions "PEP N" or
    contains the proposal's full title (>= 3 words) as a substring.
    """
    title_patterns = [
        (number, _title_pattern(pep.title))
        for number, pep in sorted(peps.items())
        if title_word_count(pep.title) >= MIN_TITLE_WORDS
    ]
    title_patterns = [(n, p) for n, p in title_patterns if p is not None]

    linked_messages: list[EmailMessage] = []
    for msg in messages:
        text = f"{msg.subject}\n{msg.body_raw}"
        linked = {n for n in find_pep_mentions(text) if n in peps}
        haystack = normalize_ws(text)
        for number, pattern in title_patterns:
            if number in linked:
                continue
            if pattern.search(haystack):
                linked.add(number)
        linked_messages.append(replace(msg, linked_peps=linked))

    corpus = LinkedCorpus(messages=linked_messages, peps=dict(peps))
    corpus.rebuild_index()
    return corpus


def classify_message_types(
    corpus: LinkedCorpus,
    state_commit_lists: list[str],
    pep_summary_subject_cues: list[str],
) -> None:
    """Fill message_type in place from list names and subject cues."""
    commit_lists = {name.lower() for name in state_commit_lists}
    cues = [c.lower() for c in pep_summary_subject_cues]
    for msg in corpus.messages:
        if msg.list_name.lower() in commit_lists:
            msg.message_type = "state_commit"
            continue
        subject = msg.subject.lower()
        if any(cue in subject for cue in cues):
            msg.message_type = "pep_summary"
        else:
            msg.message_type = "ordinary"


def dedupe_messages(messages: list[EmailMessage]) -> tuple[list[EmailMessage], list[Diagnostic]]:
    """Keep the first message per id; later duplicates become diagnostics."""
    seen: set[str] = set()
    kept: list[EmailMessage] = []
    diagnostics: list[Diagnostic] = []
    for msg in messages:
        if msg.message_id in seen:
            diagnostics.append(Diagnostic(
                source=msg.list_name,
                kind="duplicate_message_id",
                detail=msg.message_id,
            ))
            continue
        seen.add(msg.message_id)
        kept.append(msg)
    return kept, diagnostics


def write_link_stats(corpus: LinkedCorpus, path) -> None:
    """Messages-linked-per-proposal audit CSV."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pep", "final_state", "messages_linked"])
        for number in sorted(corpus.peps):
            writer.writerow([
                number,
                corpus.peps[number].final_state,
                len(corpus.per_pep_index.get(number, [])),
            ])
