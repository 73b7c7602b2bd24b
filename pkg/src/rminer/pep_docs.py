"""Proposal document headers and decision-state timelines."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .model import (
    CORPUS_START,
    DEFAULT_END_DATE,
    Diagnostic,
    PepRecord,
    StateTransition,
    StateVocabulary,
)


class PepHeaderError(ValueError):
    """Raised when a proposal document is missing a required header."""


def _parse_header_block(text: str) -> dict[str, str]:
    """RFC-822-style headers with folded continuation lines."""
    headers: dict[str, str] = {}
    last_key: str | None = None
    for line in text.splitlines():
        if not line.strip():
            break
        if line[:1] in (" ", "\t") and last_key is not None:
            headers[last_key] += " " + line.strip()
            continue
        name, sep, value = line.partition(":")
        if not sep or not name.strip():
            last_key = None
            continue
        key = name.strip().lower()
        headers[key] = value.strip()
        last_key = key
    return headers


def parse_pep_document(text: str, vocab: StateVocabulary | None = None) -> PepRecord:
    """Parse a proposal document's header block into a PepRecord (no transitions)."""
    vocab = vocab or StateVocabulary()
    headers = _parse_header_block(text)
    if "pep" not in headers:
        raise PepHeaderError("missing required header: PEP")
    if "title" not in headers:
        raise PepHeaderError("missing required header: Title")
    try:
        number = int(headers["pep"])
    except ValueError:
        raise PepHeaderError(f"PEP header is not an integer: {headers['pep']!r}")
    if number <= 0:
        raise PepHeaderError(f"PEP number must be positive: {number}")

    authors = [a.strip() for a in headers.get("author", "").split(",") if a.strip()]
    state, canonical = vocab.normalize(headers.get("status"))
    return PepRecord(
        number=number,
        title=headers["title"],
        authors=authors,
        bdfl_delegate=headers.get("bdfl-delegate") or None,
        final_state=state,
        state_is_canonical=canonical,
    )


@dataclass
class CommitLogEntry:
    date: datetime
    pep: int
    status: str
    commit: str | None = None


@dataclass
class StateHistoryResult:
    histories: dict[int, list[StateTransition]] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)


def read_commit_log(path) -> tuple[list[CommitLogEntry], list[Diagnostic]]:
    """Read a commit-log CSV with columns date,pep,status[,commit]."""
    entries: list[CommitLogEntry] = []
    diagnostics: list[Diagnostic] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            try:
                raw_date = (row.get("date") or "").strip()
                dt = datetime.fromisoformat(raw_date)
                if dt.tzinfo is None:
                    dt = dt.replace(tzinfo=timezone.utc)
                entries.append(CommitLogEntry(
                    date=dt.astimezone(timezone.utc),
                    pep=int((row.get("pep") or "").strip()),
                    status=(row.get("status") or "").strip(),
                    commit=(row.get("commit") or "").strip() or None,
                ))
            except (ValueError, AttributeError) as exc:
                diagnostics.append(Diagnostic(
                    source=f"{path}:{lineno}",
                    kind="bad_commit_row",
                    detail=str(exc),
                ))
    return entries, diagnostics


def extract_state_history(
    entries: list[CommitLogEntry],
    end_date: datetime = DEFAULT_END_DATE,
    vocab: StateVocabulary | None = None,
) -> StateHistoryResult:
    """Build per-proposal transition timelines from raw commit-log entries.

    Consecutive duplicate statuses collapse; the first observed status emits
    an initial transition with from_state None. Entries outside the
    [corpus start, end_date] window are excluded with a diagnostic.
    """
    vocab = vocab or StateVocabulary()
    result = StateHistoryResult()
    per_pep: dict[int, list[CommitLogEntry]] = {}
    for entry in entries:
        if entry.date > end_date or entry.date < CORPUS_START:
            result.diagnostics.append(Diagnostic(
                source=f"pep{entry.pep}",
                kind="out_of_window",
                detail=f"{entry.date.isoformat()} outside "
                       f"[{CORPUS_START.date()}, {end_date.date()}]",
            ))
            continue
        per_pep.setdefault(entry.pep, []).append(entry)

    for pep in sorted(per_pep):
        ordered = sorted(per_pep[pep], key=lambda e: e.date)
        transitions: list[StateTransition] = []
        previous: str | None = None
        for entry in ordered:
            state, _ = vocab.normalize(entry.status)
            if state == previous:
                continue
            transitions.append(StateTransition(
                pep=pep,
                date=entry.date,
                from_state=previous,
                to_state=state,
                source_commit=entry.commit,
            ))
            previous = state
        result.histories[pep] = transitions
    return result


def attach_history(
    peps: dict[int, PepRecord],
    history: StateHistoryResult,
    vocab: StateVocabulary | None = None,
) -> None:
    """Attach transition timelines to their proposal records in place."""
    vocab = vocab or StateVocabulary()
    for number, transitions in history.histories.items():
        pep = peps.get(number)
        if pep is None:
            continue
        pep.transitions = transitions
        if transitions:
            pep.final_state, pep.state_is_canonical = vocab.normalize(
                transitions[-1].to_state)
