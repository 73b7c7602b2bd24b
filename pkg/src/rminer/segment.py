"""Paragraph and sentence segmentation for cleaned message bodies."""
from __future__ import annotations

import re

from .model import Paragraph, Sentence, normalize_ws

# A short block with no terminal period directly above a longer block is a
# heading ("BDFL Pronouncement:" style), not a paragraph of its own.
HEADER_MAX_LEN = 60

# Sentence boundary: terminal punctuation, whitespace, then a capital or digit.
_BOUNDARY_RE = re.compile(r"[.?!]+\s+(?=[A-Z0-9])")
_TRAILING_TOKEN_RE = re.compile(r"[\w.]+$")

# Tokens that end with "." without ending a sentence. Compared after
# stripping the final period(s) and casefolding.
ABBREVIATIONS = {
    "e.g", "i.e", "vs", "etc", "cf", "al", "dr", "mr", "mrs", "ms",
    "prof", "jr", "sr", "st", "no", "approx", "dept", "fig", "sec",
}


def _is_abbreviation(prefix: str) -> bool:
    m = _TRAILING_TOKEN_RE.search(prefix)
    if not m:
        return False
    token = m.group(0).rstrip(".")
    if not token:
        return False
    if token.lower() in ABBREVIATIONS:
        return True
    # single-letter initials: "J. Doe"
    return len(token) == 1 and token.isalpha()


def split_sentences(text: str) -> list[str]:
    """Split one whitespace-normalized block into sentences.

    Boundaries are [.?!]+ runs followed by whitespace and a capital/digit,
    except after known abbreviations. Terminal punctuation stays attached.
    """
    text = normalize_ws(text)
    if not text:
        return []
    pieces = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        if "." in m.group(0) and "?" not in m.group(0) and "!" not in m.group(0):
            if _is_abbreviation(text[:m.start() + 1]):
                continue
        end = m.start() + len(m.group(0).rstrip())
        pieces.append(text[start:end])
        start = m.end()
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)
    return [p for p in (normalize_ws(p) for p in pieces) if p]


def _blocks(body: str) -> list[str]:
    """Blank-line-delimited blocks, each collapsed to one line."""
    blocks: list[str] = []
    current: list[str] = []
    for line in body.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append(normalize_ws(" ".join(current)))
            current = []
    if current:
        blocks.append(normalize_ws(" ".join(current)))
    return [b for b in blocks if b]


def _looks_like_header(block: str, following: str | None) -> bool:
    return (
        following is not None
        and len(block) <= HEADER_MAX_LEN
        and not block.endswith(".")
        and len(following) > len(block)
    )


def segment_body(body: str, message_id: str) -> list[Paragraph]:
    """Turn a cleaned body into paragraphs with message-global sentence indices."""
    blocks = _blocks(body)
    paragraphs: list[Paragraph] = []
    sentence_index = 0
    pending_header: str | None = None
    i = 0
    while i < len(blocks):
        block = blocks[i]
        nxt = blocks[i + 1] if i + 1 < len(blocks) else None
        if pending_header is None and _looks_like_header(block, nxt):
            pending_header = block
            i += 1
            continue
        para = Paragraph(index=len(paragraphs), header=pending_header)
        pending_header = None
        for text in split_sentences(block):
            para.sentences.append(Sentence(
                message_id=message_id,
                paragraph_index=para.index,
                sentence_index=sentence_index,
                text=text,
            ))
            sentence_index += 1
        if para.sentences:
            paragraphs.append(para)
        i += 1
    # trailing header with no body: keep it as its own paragraph text
    if pending_header is not None:
        para = Paragraph(index=len(paragraphs), header=None)
        for text in split_sentences(pending_header):
            para.sentences.append(Sentence(
                message_id=message_id,
                paragraph_index=para.index,
                sentence_index=sentence_index,
                text=text,
            ))
            sentence_index += 1
        if para.sentences:
            paragraphs.append(para)
    return paragraphs


def flatten_paragraphs(paragraphs: list[Paragraph]) -> str:
    """Reassemble paragraph text (headers included) for round-trip checks."""
    parts = []
    for p in paragraphs:
        if p.header:
            parts.append(p.header)
        parts.extend(s.text for s in p.sentences)
    return normalize_ws(" ".join(parts))
