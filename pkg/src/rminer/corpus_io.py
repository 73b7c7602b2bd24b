"""Corpus persistence: line-delimited JSON records plus a JSON diagnostics report."""
from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from .model import (
    Diagnostic,
    LinkedCorpus,
    message_from_record,
    message_to_record,
    pep_from_record,
    pep_to_record,
)


def save_corpus(corpus: LinkedCorpus, path) -> None:
    """One JSON object per line: proposal records first, then messages."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for number in sorted(corpus.peps):
            fh.write(json.dumps(pep_to_record(corpus.peps[number]),
                                ensure_ascii=False, sort_keys=True))
            fh.write("\n")
        for msg in corpus.messages:
            fh.write(json.dumps(message_to_record(msg),
                                ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def load_corpus(path) -> LinkedCorpus:
    corpus = LinkedCorpus()
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            kind = rec.get("kind")
            if kind == "pep":
                pep = pep_from_record(rec)
                corpus.peps[pep.number] = pep
            elif kind == "message":
                corpus.messages.append(message_from_record(rec))
            else:
                raise ValueError(f"{path}:{lineno}: unknown record kind {kind!r}")
    corpus.rebuild_index()
    return corpus


def save_diagnostics(diagnostics: list[Diagnostic], path, summary: dict | None = None) -> None:
    payload = {
        "summary": summary or {},
        "count": len(diagnostics),
        "diagnostics": [asdict(d) for d in diagnostics],
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8",
    )
