"""Author-role resolution against a configured roster and proposal metadata."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .model import EmailMessage, PepRecord, normalize_ws

ROLES = ("bdfl", "bdfl_delegate", "pep_author", "pep_editor", "core_developer", "other")

_ADDR_RE = re.compile(r"<([^<>]+)>")


def parse_identity(identity: str) -> tuple[str, str]:
    """Split an identity string into (name, email); either part may be ''."""
    identity = identity.strip()
    m = _ADDR_RE.search(identity)
    if m:
        email = m.group(1).strip().lower()
        name = normalize_ws(identity[:m.start()].strip(' "'))
        return name, email
    if "@" in identity:
        return "", identity.lower()
    return normalize_ws(identity), ""


class IdentitySet:
    """Matches messages against identity strings by email or by exact name."""

    def __init__(self, identities=()):
        self.emails: set[str] = set()
        self.names: set[str] = set()
        for identity in identities:
            name, email = parse_identity(identity)
            if email:
                self.emails.add(email)
            if name:
                self.names.add(name.casefold())

    def matches(self, author_name: str, author_email: str) -> bool:
        if author_email and author_email.lower() in self.emails:
            return True
        name = normalize_ws(author_name).casefold()
        return bool(name) and name in self.names


@dataclass
class Roster:
    bdfl: list[str] = field(default_factory=list)
    core_developers: list[str] = field(default_factory=list)
    pep_editors: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._bdfl = IdentitySet(self.bdfl)
        self._core = IdentitySet(self.core_developers)
        self._editors = IdentitySet(self.pep_editors)

    @classmethod
    def from_dict(cls, data: dict) -> "Roster":
        return cls(
            bdfl=list(data.get("bdfl", [])),
            core_developers=list(data.get("core_developers", [])),
            pep_editors=list(data.get("pep_editors", [])),
        )

    @classmethod
    def from_file(cls, path) -> "Roster":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


class PepRoleResolver:
    """Per-proposal role lookup with the identity sets built once."""

    def __init__(self, pep: PepRecord, roster: Roster):
        self._delegate = IdentitySet([pep.bdfl_delegate] if pep.bdfl_delegate else [])
        self._authors = IdentitySet(pep.authors)
        self._roster = roster

    def role(self, msg: EmailMessage) -> str:
        name, email = msg.author_name, msg.author_email
        if self._roster._bdfl.matches(name, email):
            return "bdfl"
        if self._delegate.matches(name, email):
            return "bdfl_delegate"
        if self._authors.matches(name, email):
            return "pep_author"
        if self._roster._editors.matches(name, email):
            return "pep_editor"
        if self._roster._core.matches(name, email):
            return "core_developer"
        return "other"


def resolve_role(msg: EmailMessage, pep: PepRecord, roster: Roster) -> str:
    """Highest-privilege role of the message author with respect to one proposal."""
    return PepRoleResolver(pep, roster).role(msg)
