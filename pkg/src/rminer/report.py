"""Static HTML browser for ranked rationale candidates.

One page per proposal: the decision-state timeline, the ranked sentence and
message tables, and every linked message rendered in full with candidate
rationale sentences underlined. Pure HTML with anchors, no scripts, and no
timestamps, so regenerating from identical inputs is byte-identical.
"""
from __future__ import annotations

import html
from pathlib import Path

from .model import LinkedCorpus
from .ranking import RankedList

_CSS = """
body { font-family: sans-serif; margin: 2em auto; max-width: 60em; }
table { border-collapse: collapse; margin: 1em 0; }
th, td { border: 1px solid #999; padding: 0.3em 0.6em; text-align: left; }
th { background: #eee; }
.message { border: 1px solid #ccc; margin: 1em 0; padding: 0.5em 1em; }
.meta { color: #555; font-size: 0.9em; }
.candidate { text-decoration: underline; }
.truth { background: #ffef9e; }
h2 { border-bottom: 1px solid #ccc; }
"""


def _esc(value) -> str:
    return html.escape(str(value), quote=True)


def _page(title: str, body: str) -> str:
    return (
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n"
        "<meta charset=\"utf-8\">\n"
        f"<title>{_esc(title)}</title>\n"
        f"<style>{_CSS}</style>\n"
        "</head>\n<body>\n"
        f"{body}"
        "</body>\n</html>\n"
    )


def _timeline_html(pep) -> str:
    if not pep.transitions:
        return "<p>No recorded state changes.</p>\n"
    rows = "".join(
        "<tr>"
        f"<td>{_esc(t.date.date().isoformat())}</td>"
        f"<td>{_esc(t.from_state or '—')}</td>"
        f"<td>{_esc(t.to_state)}</td>"
        f"<td>{_esc(t.source_commit or '')}</td>"
        "</tr>\n"
        for t in pep.transitions
    )
    return (
        "<table>\n<tr><th>Date</th><th>From</th><th>To</th>"
        "<th>Commit</th></tr>\n" + rows + "</table>\n"
    )


def _sbs_table(ranked: RankedList, top: int) -> str:
    rows = []
    for e in ranked.entries[:top]:
        rows.append(
            "<tr>"
            f"<td>{e.rank}</td>"
            f"<td>{e.score:.2f}</td>"
            f"<td><a href=\"#msg-{_esc(e.message_id)}\">{_esc(e.message_id)}</a></td>"
            f"<td>{_esc(e.text or '')}</td>"
            "</tr>\n")
    if not rows:
        return "<p>No candidate sentences above the score floor.</p>\n"
    return ("<table>\n<tr><th>Rank</th><th>Score</th><th>Message</th>"
            "<th>Sentence</th></tr>\n" + "".join(rows) + "</table>\n")


def _mbs_table(ranked: RankedList, top: int) -> str:
    rows = []
    for e in ranked.entries[:top]:
        members = len(e.member_sentence_indices or [])
        rows.append(
            "<tr>"
            f"<td>{e.rank}</td>"
            f"<td>{e.score:.2f}</td>"
            f"<td><a href=\"#msg-{_esc(e.message_id)}\">{_esc(e.message_id)}</a></td>"
            f"<td>{members}</td>"
            "</tr>\n")
    if not rows:
        return "<p>No candidate messages above the score floor.</p>\n"
    return ("<table>\n<tr><th>Rank</th><th>Score</th><th>Message</th>"
            "<th>Candidate sentences</th></tr>\n" + "".join(rows) + "</table>\n")


def _candidate_keys(per_scheme: dict[str, RankedList], top: int) -> set[tuple]:
    """(message_id, sentence_index) pairs to underline in rendered messages."""
    keys: set[tuple] = set()
    sbs = per_scheme.get("sbs")
    if sbs is not None:
        for e in sbs.entries[:top]:
            if e.sentence_index is not None:
                keys.add((e.message_id, e.sentence_index))
    mbs = per_scheme.get("mbs")
    if mbs is not None:
        for e in mbs.entries[:top]:
            for idx in e.member_sentence_indices or []:
                keys.add((e.message_id, idx))
    return keys


def _message_html(msg, candidates: set[tuple], truth_keys: set[tuple]) -> str:
    parts = [f'<div class="message" id="msg-{_esc(msg.message_id)}">\n']
    date = msg.date.isoformat() if msg.date else "undated"
    parts.append(
        f'<p class="meta">{_esc(msg.author_name or msg.author_email)} · '
        f'{_esc(date)} · {_esc(msg.subject)}</p>\n')
    for para in msg.paragraphs:
        if para.header:
            parts.append(f"<h4>{_esc(para.header)}</h4>\n")
        rendered = []
        for s in para.sentences:
            key = (msg.message_id, s.sentence_index)
            text = _esc(s.text)
            classes = []
            if key in candidates:
                classes.append("candidate")
            if key in truth_keys:
                classes.append("truth")
            if classes:
                text = f'<span class="{" ".join(classes)}">{text}</span>'
            rendered.append(text)
        parts.append("<p>" + " ".join(rendered) + "</p>\n")
    parts.append("</div>\n")
    return "".join(parts)


def _truth_keys_for(pep_number: int, corpus: LinkedCorpus, entries) -> set[tuple]:
    """Resolve ground-truth rows to sentence keys for highlighting."""
    from .evaluation import normalize_match_text

    keys: set[tuple] = set()
    if not entries:
        return keys
    message_map = corpus.message_map()
    for entry in entries:
        if entry.pep != pep_number:
            continue
        msg = message_map.get(entry.message_id)
        if msg is None:
            continue
        want = normalize_match_text(entry.sentence_text)
        for s in msg.sentences():
            if normalize_match_text(s.text) == want:
                keys.add((msg.message_id, s.sentence_index))
    return keys


def render_pep_page(pep, corpus: LinkedCorpus,
                    per_scheme: dict[str, RankedList],
                    truth_entries=None, top: int = 10) -> str:
    message_map = corpus.message_map()
    candidates = _candidate_keys(per_scheme, top)
    truth_keys = _truth_keys_for(pep.number, corpus, truth_entries or [])

    body = [f"<h1>PEP {pep.number}: {_esc(pep.title)}</h1>\n"]
    body.append(f"<p>Final state: <strong>{_esc(pep.final_state)}</strong>"
                f" · {_esc(len(corpus.per_pep_index.get(pep.number, [])))}"
                " linked messages</p>\n")
    body.append('<p><a href="index.html">Back to index</a></p>\n')

    body.append("<h2>State timeline</h2>\n")
    body.append(_timeline_html(pep))

    if "sbs" in per_scheme:
        body.append("<h2>Top sentences</h2>\n")
        body.append(_sbs_table(per_scheme["sbs"], top))
    if "mbs" in per_scheme:
        body.append("<h2>Top messages</h2>\n")
        body.append(_mbs_table(per_scheme["mbs"], top))

    body.append("<h2>Messages</h2>\n")
    for mid in corpus.per_pep_index.get(pep.number, []):
        msg = message_map.get(mid)
        if msg is not None:
            body.append(_message_html(msg, candidates, truth_keys))
    return _page(f"PEP {pep.number}", "".join(body))


def render_index(corpus: LinkedCorpus, pages: dict[int, str]) -> str:
    rows = []
    for number in sorted(pages):
        pep = corpus.peps[number]
        n_msgs = len(corpus.per_pep_index.get(number, []))
        rows.append(
            "<tr>"
            f'<td><a href="{pages[number]}">PEP {number}</a></td>'
            f"<td>{_esc(pep.title)}</td>"
            f"<td>{_esc(pep.final_state)}</td>"
            f"<td>{n_msgs}</td>"
            "</tr>\n")
    body = (
        "<h1>Rationale candidates</h1>\n"
        "<table>\n<tr><th>Proposal</th><th>Title</th><th>Final state</th>"
        "<th>Messages</th></tr>\n" + "".join(rows) + "</table>\n"
    )
    return _page("Rationale candidates", body)


def render_report(corpus: LinkedCorpus, rankings: dict[int, dict[str, RankedList]],
                  out_dir, truth_entries=None, top: int = 10) -> list[str]:
    """Write index.html plus one page per ranked proposal; returns warnings."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    warnings: list[str] = []
    pages: dict[int, str] = {}
    for number in sorted(rankings):
        pep = corpus.peps.get(number)
        if pep is None:
            warnings.append(f"proposal {number} not in corpus; page skipped")
            continue
        name = f"pep-{number:04d}.html"
        page = render_pep_page(pep, corpus, rankings[number], truth_entries, top)
        (out_dir / name).write_text(page, encoding="utf-8", newline="\n")
        pages[number] = name
    (out_dir / "index.html").write_text(render_index(corpus, pages),
                                        encoding="utf-8", newline="\n")
    return warnings
