"""Structural input validation for corpora and configuration values."""
from __future__ import annotations

from .model import LinkedCorpus, message_date_key


class InputValidationError(ValueError):
    """Input fails a structural contract; carries all problems found."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


def check_corpus(corpus: LinkedCorpus, max_problems: int = 20) -> LinkedCorpus:
    """Raise InputValidationError when corpus structure is inconsistent."""
    problems: list[str] = []

    seen_ids: set[str] = set()
    for msg in corpus.messages:
        if not msg.message_id:
            problems.append("message with empty message_id")
        elif msg.message_id in seen_ids:
            problems.append(f"duplicate message_id: {msg.message_id}")
        else:
            seen_ids.add(msg.message_id)
        if msg.date is not None and msg.date.tzinfo is None:
            problems.append(f"{msg.message_id}: naive datetime")
        expected = 0
        for para in msg.paragraphs:
            for s in para.sentences:
                if s.sentence_index != expected:
                    problems.append(
                        f"{msg.message_id}: sentence indices not contiguous")
                    expected = s.sentence_index
                expected += 1
                if not s.text.strip():
                    problems.append(f"{msg.message_id}: empty sentence text")
        if len(problems) >= max_problems:
            break

    message_map = {m.message_id: m for m in corpus.messages}
    for pep, ids in corpus.per_pep_index.items():
        if pep not in corpus.peps:
            problems.append(f"per_pep_index references unknown proposal {pep}")
            continue
        keys = []
        for mid in ids:
            msg = message_map.get(mid)
            if msg is None:
                problems.append(f"pep {pep}: index references unknown message {mid}")
                continue
            if pep not in msg.linked_peps:
                problems.append(f"pep {pep}: message {mid} not linked to it")
            keys.append(message_date_key(msg))
        if keys != sorted(keys):
            problems.append(f"pep {pep}: index not date-sorted")
        if len(problems) >= max_problems:
            break

    if problems:
        raise InputValidationError(problems[:max_problems])
    return corpus


def check_transitions(corpus: LinkedCorpus) -> list[str]:
    """Non-fatal checks on proposal timelines; returns problem strings."""
    problems = []
    for pep in corpus.peps.values():
        dates = [t.date for t in pep.transitions]
        if dates != sorted(dates):
            problems.append(f"pep {pep.number}: transitions not date-sorted")
        if pep.transitions and pep.final_state != pep.transitions[-1].to_state:
            problems.append(
                f"pep {pep.number}: final_state {pep.final_state!r} != last "
                f"transition {pep.transitions[-1].to_state!r}")
    return problems
