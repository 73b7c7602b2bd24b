"""Mbox archive parsing.

The "From "-line block splitter is hand-rolled so every input block can be
accounted for (parsed messages + diagnostics == blocks); per-block RFC-822
parsing is delegated to the stdlib email package. Parsing never raises on
arbitrary bytes: anything unparseable becomes a diagnostic.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import timezone
from email import policy
from email.message import Message
from email.parser import BytesParser
from email.utils import parseaddr, parsedate_to_datetime

from .model import Diagnostic, EmailMessage
from .segment import segment_body

_MSGID_RE = re.compile(r"<([^<>]+)>")
_PARSER = BytesParser(policy=policy.default)


@dataclass
class MboxParseResult:
    messages: list[EmailMessage] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    block_count: int = 0


def split_blocks(data: bytes) -> list[bytes]:
    """Split raw mbox bytes into per-message blocks.

    A block starts at a line beginning with "From " (the envelope line).
    Non-blank content before the first envelope line is kept as a block of
    its own so it can be reported instead of silently dropped.
    """
    blocks: list[bytes] = []
    current: list[bytes] = []
    seen_envelope = False
    for line in data.splitlines(keepends=True):
        if line.startswith(b"From "):
            if current and (seen_envelope or any(ln.strip() for ln in current)):
                blocks.append(b"".join(current))
            current = [line]
            seen_envelope = True
        else:
            current.append(line)
    if current and (seen_envelope or any(ln.strip() for ln in current)):
        blocks.append(b"".join(current))
    return blocks


def clean_body(text: str) -> str:
    """Drop quoted reply lines and everything after a signature separator."""
    kept: list[str] = []
    for line in text.splitlines():
        if line.rstrip() == "--":
            break
        if line.lstrip().startswith(">"):
            continue
        kept.append(line)
    return "\n".join(kept)


def _decode_part(part: Message) -> str:
    payload = part.get_payload(decode=True)
    if payload is None:
        payload = part.get_payload()
        return payload if isinstance(payload, str) else ""
    charset = part.get_content_charset() or "utf-8"
    try:
        return payload.decode(charset, errors="replace")
    except (LookupError, UnicodeError):
        return payload.decode("utf-8", errors="replace")


def extract_plain_text(msg: Message) -> str:
    """Concatenate all text/plain parts; other content types are ignored."""
    if msg.is_multipart():
        parts = []
        for part in msg.walk():
            if part.is_multipart():
                continue
            if part.get_content_type() != "text/plain":
                continue
            if part.get_content_disposition() == "attachment":
                continue
            parts.append(_decode_part(part))
        return "\n".join(parts)
    if msg.get_content_type() == "text/plain":
        return _decode_part(msg)
    return ""


def _header(msg: Message, name: str) -> str | None:
    # policy.default can raise on pathological header bytes; treat as absent
    try:
        value = msg.get(name)
    except Exception:
        return None
    return str(value) if value is not None else None


def _parse_date(raw: str | None):
    if not raw:
        return None
    try:
        dt = parsedate_to_datetime(raw)
    except (TypeError, ValueError, OverflowError):
        return None
    if dt is None:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    try:
        return dt.astimezone(timezone.utc)
    except (OverflowError, OSError, ValueError):
        return None


def _fallback_id(list_name: str, subject: str, date_raw: str, body: str) -> str:
    digest = hashlib.sha1(
        "\x1f".join((list_name, subject, date_raw, body[:256])).encode("utf-8", "replace")
    ).hexdigest()
    return f"noid-{digest[:16]}@generated"


def parse_block(block: bytes, list_name: str) -> EmailMessage:
    """Parse one mbox block. Raises ValueError when there is nothing to parse."""
    newline = block.find(b"\n")
    payload = block[newline + 1:] if newline >= 0 else b""
    msg = _PARSER.parsebytes(payload)
    if not msg.keys():
        raise ValueError("no RFC-822 headers")

    subject = _header(msg, "Subject") or ""
    date_raw = _header(msg, "Date") or ""
    author_name, author_email = parseaddr(_header(msg, "From") or "")

    raw_id = _header(msg, "Message-ID") or _header(msg, "Message-Id") or ""
    m = _MSGID_RE.search(raw_id)
    message_id = m.group(1).strip() if m else raw_id.strip().strip("<>")

    body = clean_body(extract_plain_text(msg))
    if not message_id:
        message_id = _fallback_id(list_name, subject, date_raw, body)

    reply_raw = _header(msg, "In-Reply-To") or ""
    m = _MSGID_RE.search(reply_raw)
    in_reply_to = m.group(1).strip() if m else (reply_raw.strip().strip("<>") or None)

    email_msg = EmailMessage(
        message_id=message_id,
        subject=subject,
        author_name=author_name,
        author_email=author_email.lower(),
        date=_parse_date(date_raw),
        in_reply_to=in_reply_to,
        list_name=list_name,
        body_raw=body,
        paragraphs=[],
    )
    email_msg.paragraphs = segment_body(body, message_id)
    return email_msg


def parse_mbox(data: bytes, list_name: str) -> MboxParseResult:
    """Parse an mbox byte stream; every block becomes a message or a diagnostic."""
    result = MboxParseResult()
    blocks = split_blocks(data)
    result.block_count = len(blocks)
    for idx, block in enumerate(blocks):
        if not block.startswith(b"From "):
            result.diagnostics.append(Diagnostic(
                source=f"{list_name}:block{idx}",
                kind="no_envelope",
                detail="content before first envelope line",
            ))
            continue
        try:
            result.messages.append(parse_block(block, list_name))
        except Exception as exc:
            result.diagnostics.append(Diagnostic(
                source=f"{list_name}:block{idx}",
                kind="malformed_block",
                detail=f"{type(exc).__name__}: {exc}",
            ))
    return result


def parse_mbox_file(path, list_name: str | None = None) -> MboxParseResult:
    import pathlib

    p = pathlib.Path(path)
    name = list_name if list_name is not None else p.stem
    return parse_mbox(p.read_bytes(), name)
