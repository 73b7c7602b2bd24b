"""Shared builders for hand-constructed corpora."""
from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from rminer.model import (
    EmailMessage,
    LinkedCorpus,
    Paragraph,
    PepRecord,
    Sentence,
    StateTransition,
)

UTC = timezone.utc
DECISIVE = datetime(2016, 5, 10, 12, 0, tzinfo=UTC)


def build_message(message_id, body_paras, *, subject="PEP 900: topic",
                  author="Pat Poster <pat@example.org>", date=DECISIVE,
                  linked=(900,), list_name="general", message_type="ordinary",
                  headers=None):
    """Message from explicit paragraph structure (list of sentence lists)."""
    name, _, rest = author.partition("<")
    email = rest.rstrip(">").strip()
    msg = EmailMessage(
        message_id=message_id,
        subject=subject,
        author_name=name.strip(),
        author_email=email.lower(),
        date=date,
        in_reply_to=None,
        list_name=list_name,
        body_raw="\n\n".join(" ".join(p) for p in body_paras),
        linked_peps=set(linked),
        message_type=message_type,
    )
    idx = 0
    for p_i, texts in enumerate(body_paras):
        header = (headers or {}).get(p_i)
        para = Paragraph(index=p_i, header=header)
        for text in texts:
            para.sentences.append(Sentence(
                message_id=message_id, paragraph_index=p_i,
                sentence_index=idx, text=text))
            idx += 1
        msg.paragraphs.append(para)
    return msg


def build_pep(number=900, *, title="Widget Frobnication Overhaul",
              authors=("Avery Author <avery@example.org>",),
              delegate=None, state="accepted", decided=DECISIVE):
    pep = PepRecord(
        number=number, title=title, authors=list(authors),
        bdfl_delegate=delegate, final_state=state, state_is_canonical=True)
    pep.transitions = [
        StateTransition(pep=number, date=decided - timedelta(days=120),
                        from_state=None, to_state="draft"),
        StateTransition(pep=number, date=decided, from_state="draft",
                        to_state=state, source_commit="abc123"),
    ]
    return pep


def build_corpus(messages, peps):
    corpus = LinkedCorpus(messages=list(messages),
                          peps={p.number: p for p in peps})
    corpus.rebuild_index()
    return corpus


@pytest.fixture
def basic_pep():
    return build_pep()


@pytest.fixture
def day():
    return timedelta(days=1)
