"""End-to-end ingest: archives + proposal docs + commit log -> linked corpus."""
from __future__ import annotations

from pathlib import Path

from .config import AppConfig
from .linker import classify_message_types, dedupe_messages, link_messages
from .mbox import parse_mbox_file
from .model import Diagnostic, EmailMessage, LinkedCorpus, PepRecord, StateVocabulary
from .pep_docs import (
    PepHeaderError,
    attach_history,
    extract_state_history,
    parse_pep_document,
    read_commit_log,
)


def collect_pep_files(paths) -> list[Path]:
    """Expand files and directories into a sorted list of proposal documents."""
    out: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            out.extend(sorted(p for p in path.iterdir()
                              if p.is_file() and p.suffix in (".txt", ".rst")))
        else:
            out.append(path)
    return out


def load_peps(paths, vocab: StateVocabulary | None = None,
              ) -> tuple[dict[int, PepRecord], list[Diagnostic]]:
    vocab = vocab or StateVocabulary()
    peps: dict[int, PepRecord] = {}
    diagnostics: list[Diagnostic] = []
    for path in collect_pep_files(paths):
        try:
            record = parse_pep_document(
                Path(path).read_text(encoding="utf-8", errors="replace"), vocab)
        except (OSError, PepHeaderError) as exc:
            diagnostics.append(Diagnostic(
                source=str(path), kind="bad_pep_document", detail=str(exc)))
            continue
        if record.number in peps:
            diagnostics.append(Diagnostic(
                source=str(path), kind="duplicate_pep",
                detail=f"PEP {record.number} already loaded"))
            continue
        peps[record.number] = record
    return peps, diagnostics


def ingest(mbox_paths, pep_paths, commits_path=None,
           config: AppConfig | None = None,
           ) -> tuple[LinkedCorpus, list[Diagnostic]]:
    """Run the full ingest pipeline and return the linked corpus.

    Never raises on malformed archive content; every skipped input surfaces
    as a diagnostic. Missing files do raise (OSError) since that is a usage
    error rather than dirty data.
    """
    config = config or AppConfig()
    vocab = StateVocabulary(extra_states=config.extra_states)
    diagnostics: list[Diagnostic] = []

    messages: list[EmailMessage] = []
    for path in mbox_paths:
        result = parse_mbox_file(path)
        messages.extend(result.messages)
        diagnostics.extend(result.diagnostics)
    messages, dupes = dedupe_messages(messages)
    diagnostics.extend(dupes)

    peps, pep_diags = load_peps(pep_paths, vocab)
    diagnostics.extend(pep_diags)

    if commits_path is not None:
        entries, commit_diags = read_commit_log(commits_path)
        diagnostics.extend(commit_diags)
        history = extract_state_history(entries, config.end_datetime(), vocab)
        diagnostics.extend(history.diagnostics)
        attach_history(peps, history, vocab)

    corpus = link_messages(messages, peps)
    classify_message_types(corpus, config.state_commit_lists,
                           config.pep_summary_subject_cues)
    return corpus, diagnostics
