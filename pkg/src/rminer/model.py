"""Core data model: messages, proposals, state transitions, scored sentences.

Everything in here is a plain dataclass with explicit to_record/from_record
converters so the corpus can round-trip through line-delimited JSON without
pickle or schema magic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

# Eight official proposal states; the vocabulary is open so mined extras can
# be added through configuration.
OFFICIAL_STATES = (
    "draft",
    "accepted",
    "rejected",
    "final",
    "active",
    "superseded",
    "withdrawn",
    "deferred",
)

DECISIVE_STATES = ("accepted", "rejected")

# Archive window: list traffic before this date predates the proposal process.
CORPUS_START = datetime(1995, 3, 1, tzinfo=timezone.utc)
DEFAULT_END_DATE = datetime(2018, 7, 12, tzinfo=timezone.utc)

_WS_RE = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim."""
    return _WS_RE.sub(" ", text).strip()


class StateVocabulary:
    """Open vocabulary of proposal state names.

    Seeded with the eight official states; extra states can be registered
    from configuration. Lookups never fail: unknown values normalize to a
    lowercase string flagged non-canonical.
    """

    def __init__(self, extra_states: tuple[str, ...] | list[str] = ()):
        self.states = set(OFFICIAL_STATES)
        for s in extra_states:
            self.states.add(s.strip().lower())

    def normalize(self, raw: str | None) -> tuple[str, bool]:
        """Return (canonical lowercase state, is_canonical)."""
        if raw is None:
            return "unknown", False
        name = raw.strip().lower()
        if not name:
            return "unknown", False
        return name, name in self.states


@dataclass
class Sentence:
    message_id: str
    paragraph_index: int
    sentence_index: int  # message-global, 0-based
    text: str


@dataclass
class Paragraph:
    index: int
    header: str | None
    sentences: list[Sentence] = field(default_factory=list)


@dataclass
class EmailMessage:
    message_id: str
    subject: str
    author_name: str
    author_email: str
    date: datetime | None  # UTC; None when the Date header was unparseable
    in_reply_to: str | None
    list_name: str
    body_raw: str
    paragraphs: list[Paragraph] = field(default_factory=list)
    linked_peps: set[int] = field(default_factory=set)
    message_type: str = "ordinary"  # ordinary | pep_summary | state_commit

    def sentences(self) -> list[Sentence]:
        return [s for p in self.paragraphs for s in p.sentences]


@dataclass
class StateTransition:
    pep: int
    date: datetime
    from_state: str | None
    to_state: str
    source_commit: str | None = None


@dataclass
class PepRecord:
    number: int
    title: str
    authors: list[str] = field(default_factory=list)
    bdfl_delegate: str | None = None
    final_state: str = "unknown"
    state_is_canonical: bool = False
    transitions: list[StateTransition] = field(default_factory=list)

    def decisive_date(self) -> datetime | None:
        """Date of the last transition into accepted/rejected, if any."""
        decisive = None
        for t in self.transitions:
            if t.to_state in DECISIVE_STATES:
                decisive = t.date
        return decisive


@dataclass
class Diagnostic:
    source: str
    kind: str
    detail: str


def message_date_key(msg: EmailMessage) -> tuple:
    """Sort key placing dated messages chronologically and undated ones last."""
    if msg.date is None:
        return (1, "", msg.message_id)
    return (0, msg.date.isoformat(), msg.message_id)


@dataclass
class LinkedCorpus:
    messages: list[EmailMessage] = field(default_factory=list)
    peps: dict[int, PepRecord] = field(default_factory=dict)
    per_pep_index: dict[int, list[str]] = field(default_factory=dict)

    def message_map(self) -> dict[str, EmailMessage]:
        return {m.message_id: m for m in self.messages}

    def rebuild_index(self) -> None:
        """Recompute per_pep_index (date-ordered message ids per proposal)."""
        index: dict[int, list[EmailMessage]] = {}
        for msg in self.messages:
            for pep in msg.linked_peps:
                if pep in self.peps:
                    index.setdefault(pep, []).append(msg)
        self.per_pep_index = {
            pep: [m.message_id for m in sorted(msgs, key=message_date_key)]
            for pep, msgs in sorted(index.items())
        }


# --- serialization -----------------------------------------------------------

def _dt_to_str(dt: datetime | None) -> str | None:
    return None if dt is None else dt.astimezone(timezone.utc).isoformat()


def _dt_from_str(s: str | None) -> datetime | None:
    if s is None:
        return None
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def message_to_record(msg: EmailMessage) -> dict:
    return {
        "kind": "message",
        "message_id": msg.message_id,
        "subject": msg.subject,
        "author_name": msg.author_name,
        "author_email": msg.author_email,
        "date": _dt_to_str(msg.date),
        "in_reply_to": msg.in_reply_to,
        "list_name": msg.list_name,
        "body_raw": msg.body_raw,
        "paragraphs": [
            {
                "index": p.index,
                "header": p.header,
                "sentences": [
                    {"paragraph_index": s.paragraph_index,
                     "sentence_index": s.sentence_index,
                     "text": s.text}
                    for s in p.sentences
                ],
            }
            for p in msg.paragraphs
        ],
        "linked_peps": sorted(msg.linked_peps),
        "message_type": msg.message_type,
    }


def message_from_record(rec: dict) -> EmailMessage:
    msg = EmailMessage(
        message_id=rec["message_id"],
        subject=rec["subject"],
        author_name=rec["author_name"],
        author_email=rec["author_email"],
        date=_dt_from_str(rec["date"]),
        in_reply_to=rec["in_reply_to"],
        list_name=rec["list_name"],
        body_raw=rec["body_raw"],
        linked_peps=set(rec.get("linked_peps", [])),
        message_type=rec.get("message_type", "ordinary"),
    )
    for p in rec["paragraphs"]:
        para = Paragraph(index=p["index"], header=p["header"])
        for s in p["sentences"]:
            para.sentences.append(Sentence(
                message_id=msg.message_id,
                paragraph_index=s["paragraph_index"],
                sentence_index=s["sentence_index"],
                text=s["text"],
            ))
        msg.paragraphs.append(para)
    return msg


def pep_to_record(pep: PepRecord) -> dict:
    return {
        "kind": "pep",
        "number": pep.number,
        "title": pep.title,
        "authors": pep.authors,
        "bdfl_delegate": pep.bdfl_delegate,
        "final_state": pep.final_state,
        "state_is_canonical": pep.state_is_canonical,
        "transitions": [
            {"pep": t.pep,
             "date": _dt_to_str(t.date),
             "from_state": t.from_state,
             "to_state": t.to_state,
             "source_commit": t.source_commit}
            for t in pep.transitions
        ],
    }


def pep_from_record(rec: dict) -> PepRecord:
    pep = PepRecord(
        number=rec["number"],
        title=rec["title"],
        authors=list(rec.get("authors", [])),
        bdfl_delegate=rec.get("bdfl_delegate"),
        final_state=rec.get("final_state", "unknown"),
        state_is_canonical=rec.get("state_is_canonical", False),
    )
    for t in rec.get("transitions", []):
        pep.transitions.append(StateTransition(
            pep=t["pep"],
            date=_dt_from_str(t["date"]),
            from_state=t["from_state"],
            to_state=t["to_state"],
            source_commit=t.get("source_commit"),
        ))
    return pep
