"""Deterministic synthetic discussion corpora with planted rationale sentences.

The generator emits the same artifact kinds the ingest pipeline consumes
(mbox archive, proposal documents, commit log, roster) plus a ground-truth
file naming each planted sentence. Planted sentences are built from
templates that activate the default lexicon's term patterns for their
rationale label; everything else is drawn from vocabularies disjoint from
the lexicon, so in the default mode no noise sentence can activate a text
heuristic. Adversarial mode injects single lexicon phrases into noise
sentences to stress ranking precision.
"""
from __future__ import annotations

import hashlib
import json
import random
import string
import textwrap
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from email.utils import format_datetime
from pathlib import Path

from .lexicon import Lexicon

RATIONALE_LABELS = (
    "consensus",
    "no_consensus",
    "lazy_consensus",
    "rough_consensus",
    "little_support",
    "majority",
    "no_majority",
    "bdfl_decree",
    "bdfl_pronouncement_after_no_consensus",
    "bdfl_pronouncement_over_majority",
    "inept_pep",
)

# One rationale sentence per label. Each instantiation contains a term
# pattern scoring >= 0.8 and a decision term inside a subject-verb-object
# clause, and none of the negation terms.
TEMPLATES = {
    "consensus": (
        "The community reached consensus that PEP {pep} should be accepted "
        "because the design is sound."),
    "no_consensus": (
        "After months of debate the community reached no consensus, "
        "so PEP {pep} was rejected."),
    "lazy_consensus": (
        "Nobody objected during the review period, so the proposal was "
        "accepted by lazy consensus because silence means agreement."),
    "rough_consensus": (
        "Rough consensus emerged on the list and the BDFL decided "
        "PEP {pep} should be accepted."),
    "little_support": (
        "Core developers opposed the idea because there was little support, "
        "therefore PEP {pep} was rejected."),
    "majority": (
        "A clear majority voted in favor, so the community agreed "
        "PEP {pep} should be accepted."),
    "no_majority": (
        "The vote showed no majority for the change, thus PEP {pep} was "
        "rejected by the BDFL."),
    "bdfl_decree": (
        "By BDFL decree PEP {pep} is accepted, and the decision is final "
        "because the community debate had stalled."),
    "bdfl_pronouncement_after_no_consensus": (
        "Since the community reached no consensus, I am accepting PEP {pep} "
        "by BDFL pronouncement because a decision was needed."),
    "bdfl_pronouncement_over_majority": (
        "Although the majority voted in favor, I am rejecting PEP {pep} by "
        "BDFL pronouncement because the design adds complexity."),
    "inept_pep": (
        "The proposal was rejected as inept because the motivating use case "
        "was unconvincing to core developers."),
}

LABEL_STATES = {
    "consensus": "accepted",
    "no_consensus": "rejected",
    "lazy_consensus": "accepted",
    "rough_consensus": "accepted",
    "little_support": "rejected",
    "majority": "accepted",
    "no_majority": "rejected",
    "bdfl_decree": "accepted",
    "bdfl_pronouncement_after_no_consensus": "accepted",
    "bdfl_pronouncement_over_majority": "rejected",
    "inept_pep": "rejected",
}

LABEL_ROLES = {
    "consensus": "core_developer",
    "no_consensus": "core_developer",
    "lazy_consensus": "pep_author",
    "rough_consensus": "bdfl",
    "little_support": "core_developer",
    "majority": "pep_author",
    "no_majority": "bdfl_delegate",
    "bdfl_decree": "bdfl",
    "bdfl_pronouncement_after_no_consensus": "bdfl",
    "bdfl_pronouncement_over_majority": "bdfl",
    "inept_pep": "pep_editor",
}

# Fixed identities. Noise messages only ever come from core developers and
# unaffiliated posters, which bounds their author-role score.
BDFL_IDENTITY = "Bea Decider <bea@lists.example>"
DELEGATE_IDENTITY = "Dana Delegate <dana@lists.example>"
EDITOR_IDENTITY = "Eli Editor <eli@lists.example>"
CORE_IDENTITIES = (
    "Casey Core <casey@lists.example>",
    "Corey Core <corey@lists.example>",
    "Cameron Core <cameron@lists.example>",
)
OTHER_IDENTITIES = (
    "Pat Poster <pat@lists.example>",
    "Riley Reader <riley@lists.example>",
    "Sam Subscriber <sam@lists.example>",
    "Toni Thread <toni@lists.example>",
)

# Disjoint from every lexicon phrase list (checked at generation time).
NOISE_ADJECTIVES = (
    "quiet", "shiny", "narrow", "wooden", "gentle", "crooked", "dusty",
    "pale", "smooth", "rustic", "hollow", "mossy", "faded", "sturdy",
    "curved", "speckled",
)
NOISE_NOUNS = (
    "garden", "kettle", "lantern", "meadow", "pebble", "ribbon", "saddle",
    "teapot", "valley", "window", "basket", "candle", "drawer", "engine",
    "fabric", "hammer", "island", "jacket", "ladder", "marble", "needle",
    "orchard", "pillow", "quarry",
)
NOISE_VERBS = ("was", "seemed", "appeared", "remained", "became")
NOISE_PREPOSITIONS = (
    "near", "beside", "behind", "under", "above", "along", "around",
    "beyond",
)

# Titles come from a separate pool so message noise can never contain a
# proposal title as a substring.
TITLE_WORDS = (
    "aurora", "basalt", "cobalt", "dune", "ember", "fjord", "garnet",
    "harbor", "ingot", "juniper", "lagoon", "mesa", "nickel", "onyx",
    "prairie", "quartz", "reef", "summit", "tundra", "willow", "zephyr",
    "granite", "thicket", "cascade",
)

_TEMPLATE_FIELDS_FIXED = ("pep", "title")

_BASE_DECISIVE = datetime(2008, 1, 8, 12, 0, tzinfo=timezone.utc)
_PEP_SPACING_DAYS = 7
_FIRST_PEP = 101
_LIST_NAME = "proposals"
_WRAP_WIDTH = 76


class SynthError(ValueError):
    """Invalid generation parameters or template."""


@dataclass(frozen=True)
class PlantedSpec:
    label: str
    template: str | None = None
    author_role: str | None = None
    days_offset: int | None = None


@dataclass
class SynthSpec:
    seed: int = 0
    n_peps: int = 10
    messages_per_pep: tuple[int, int] = (6, 10)
    noise_sentences_per_message: tuple[int, int] = (8, 16)
    adversarial: bool = False
    adversarial_rate: float = 0.25
    planted_rationale: list[PlantedSpec] | None = None

    def validate(self) -> None:
        if not 1 <= self.n_peps <= 500:
            raise SynthError(f"n_peps must be in [1, 500], got {self.n_peps}")
        for name, rng_pair in (("messages_per_pep", self.messages_per_pep),
                               ("noise_sentences_per_message",
                                self.noise_sentences_per_message)):
            lo, hi = rng_pair
            if lo > hi or lo < 0:
                raise SynthError(f"{name}: bad range ({lo}, {hi})")
        if self.messages_per_pep[0] < 1:
            raise SynthError("messages_per_pep must allow at least 1 message")
        if not 0.0 <= self.adversarial_rate <= 1.0:
            raise SynthError(
                f"adversarial_rate must be in [0, 1], got {self.adversarial_rate}")
        if self.planted_rationale is not None:
            if not self.planted_rationale:
                raise SynthError("planted_rationale must not be empty")
            for p in self.planted_rationale:
                if p.label not in RATIONALE_LABELS:
                    raise SynthError(f"unknown rationale label: {p.label!r}")
                if p.author_role is not None and p.author_role not in LABEL_ROLES.values() \
                        and p.author_role != "other":
                    raise SynthError(f"unknown author role: {p.author_role!r}")
                if p.days_offset is not None and abs(p.days_offset) > 365:
                    raise SynthError(
                        f"days_offset out of range: {p.days_offset}")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        planted = None
        if data.get("planted_rationale") is not None:
            planted = [
                PlantedSpec(
                    label=p["label"],
                    template=p.get("template"),
                    author_role=p.get("author_role"),
                    days_offset=p.get("days_offset"),
                )
                for p in data["planted_rationale"]
            ]
        spec = cls(
            seed=int(data.get("seed", 0)),
            n_peps=int(data.get("n_peps", 10)),
            messages_per_pep=tuple(data.get("messages_per_pep", (6, 10))),
            noise_sentences_per_message=tuple(
                data.get("noise_sentences_per_message", (8, 16))),
            adversarial=bool(data.get("adversarial", False)),
            adversarial_rate=float(data.get("adversarial_rate", 0.25)),
            planted_rationale=planted,
        )
        spec.validate()
        return spec

    @classmethod
    def from_file(cls, path) -> "SynthSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        planted = None
        if self.planted_rationale is not None:
            planted = [
                {"label": p.label, "template": p.template,
                 "author_role": p.author_role, "days_offset": p.days_offset}
                for p in self.planted_rationale
            ]
        return {
            "seed": self.seed,
            "n_peps": self.n_peps,
            "messages_per_pep": list(self.messages_per_pep),
            "noise_sentences_per_message": list(self.noise_sentences_per_message),
            "adversarial": self.adversarial,
            "adversarial_rate": self.adversarial_rate,
            "planted_rationale": planted,
        }


@dataclass
class PlantedSentence:
    pep: int
    label: str
    final_state: str
    message_id: str
    text: str
    author_role: str
    days_offset: int


@dataclass
class SynthResult:
    out_dir: Path
    mbox_path: Path
    pep_paths: list[Path]
    commits_path: Path
    ground_truth_path: Path
    roster_path: Path
    spec_path: Path
    planted: list[PlantedSentence] = field(default_factory=list)


def _audit_vocabulary(lexicon: Lexicon) -> None:
    """Refuse to generate if the noise/title vocabularies touch the lexicon."""
    words = (NOISE_ADJECTIVES + NOISE_NOUNS + NOISE_PREPOSITIONS + TITLE_WORDS
             + ("the", "hello", "thanks"))
    problems = []
    for word in words:
        if lexicon.match_term_types(word):
            problems.append(f"{word!r} matches a term type")
        if lexicon.detect_negation(word):
            problems.append(f"{word!r} is a negation term")
        if lexicon.matches_decision_terms(word):
            problems.append(f"{word!r} is a decision term")
        if lexicon.contains_heading_term(word):
            problems.append(f"{word!r} is a heading term")
    haystack = " ".join(words)
    for role in ("pep_author", "bdfl", "other"):
        if lexicon.match_samcer(haystack, "", role):
            problems.append(f"vocabulary matches a message-class cue ({role})")
    if problems:
        raise SynthError("vocabulary overlaps the lexicon: " + "; ".join(problems))


def _template_fields(template: str) -> set[str]:
    return {fname for _, fname, _, _ in string.Formatter().parse(template)
            if fname is not None}


def _instantiate_template(template: str, pep: int, title: str,
                          lexicon: Lexicon, rng: random.Random) -> str:
    """Fill {pep}, {title}, and term-type placeholders with concrete phrases."""
    fields = _template_fields(template)
    allowed = set(_TEMPLATE_FIELDS_FIXED) | set(lexicon.term_types)
    unknown = fields - allowed
    if unknown:
        raise SynthError(
            f"template references unknown term types or fields: {sorted(unknown)}")
    values = {"pep": pep, "title": title}
    for fname in sorted(fields - set(_TEMPLATE_FIELDS_FIXED)):
        phrases = lexicon.term_types[fname]
        if not phrases:
            raise SynthError(f"term type {fname!r} has no phrases to draw from")
        values[fname] = rng.choice(phrases)
    return template.format(**values)


def _adversarial_pool(lexicon: Lexicon) -> list[list[str]]:
    """Phrase buckets reused verbatim inside noise to stress precision."""
    buckets = [list(lexicon.term_types[t]) for t in sorted(lexicon.term_types)]
    buckets.append(list(lexicon.decision_terms))
    buckets.append(["the decision was made", "decision was taken"])
    return [b for b in buckets if b]


def _noise_sentence(rng: random.Random, adversarial_pool, rate: float) -> str:
    text = (f"The {rng.choice(NOISE_ADJECTIVES)} {rng.choice(NOISE_NOUNS)} "
            f"{rng.choice(NOISE_VERBS)} {rng.choice(NOISE_PREPOSITIONS)} "
            f"the {rng.choice(NOISE_NOUNS)}")
    if adversarial_pool and rng.random() < rate:
        phrase = rng.choice(rng.choice(adversarial_pool))
        text += f" about the {phrase}"
    return text + "."


def _noise_paragraphs(rng: random.Random, n_sentences: int,
                      adversarial_pool, rate: float) -> list[str]:
    sentences = [_noise_sentence(rng, adversarial_pool, rate)
                 for _ in range(n_sentences)]
    paragraphs: list[str] = []
    i = 0
    while i < len(sentences):
        take = min(len(sentences) - i, rng.randint(2, 4))
        paragraphs.append(" ".join(sentences[i:i + take]))
        i += take
    return paragraphs


def _make_title(rng: random.Random, used: set[str]) -> str:
    while True:
        words = rng.sample(TITLE_WORDS, 4)
        title = " ".join(w.capitalize() for w in words)
        if title not in used:
            used.add(title)
            return title


def _role_identity(role: str, pep_author: str, rng: random.Random) -> str:
    if role == "bdfl":
        return BDFL_IDENTITY
    if role == "bdfl_delegate":
        return DELEGATE_IDENTITY
    if role == "pep_author":
        return pep_author
    if role == "pep_editor":
        return EDITOR_IDENTITY
    if role == "core_developer":
        return rng.choice(CORE_IDENTITIES)
    return rng.choice(OTHER_IDENTITIES)


def _render_message(envelope_email: str, identity: str, subject: str,
                    date: datetime, message_id: str, in_reply_to: str | None,
                    paragraphs: list[str]) -> str:
    lines = [
        f"From {envelope_email} {date.strftime('%a %b %d %H:%M:%S %Y')}",
        f"From: {identity}",
        "To: proposals@lists.example",
        f"Subject: {subject}",
        f"Date: {format_datetime(date)}",
        f"Message-ID: <{message_id}>",
    ]
    if in_reply_to:
        lines.append(f"In-Reply-To: <{in_reply_to}>")
    lines.append('Content-Type: text/plain; charset="utf-8"')
    lines.append("")
    body = "\n\n".join(textwrap.fill(p, width=_WRAP_WIDTH) for p in paragraphs)
    lines.append(body)
    lines.append("")
    return "\n".join(lines)


def _identity_email(identity: str) -> str:
    start = identity.find("<")
    end = identity.find(">")
    return identity[start + 1:end] if 0 <= start < end else identity


def _planted_for(spec: SynthSpec, index: int) -> PlantedSpec:
    if spec.planted_rationale:
        return spec.planted_rationale[index % len(spec.planted_rationale)]
    return PlantedSpec(label=RATIONALE_LABELS[index % len(RATIONALE_LABELS)])


def generate(spec: SynthSpec, out_dir, lexicon: Lexicon | None = None) -> SynthResult:
    """Write a complete synthetic corpus under out_dir.

    Identical spec and seed produce byte-identical outputs: one seeded RNG
    drives every choice in a fixed iteration order, and nothing depends on
    the clock or the filesystem.
    """
    spec.validate()
    lexicon = lexicon if lexicon is not None else Lexicon.default()
    _audit_vocabulary(lexicon)
    rng = random.Random(spec.seed)
    adversarial_pool = _adversarial_pool(lexicon) if spec.adversarial else []

    out_dir = Path(out_dir)
    pep_dir = out_dir / "peps"
    pep_dir.mkdir(parents=True, exist_ok=True)

    mbox_chunks: list[str] = []
    pep_paths: list[Path] = []
    commit_rows: list[tuple[str, int, str, str]] = []
    gt_rows: list[tuple] = []
    planted_out: list[PlantedSentence] = []
    used_titles: set[str] = set()

    for index in range(spec.n_peps):
        pep = _FIRST_PEP + index
        title = _make_title(rng, used_titles)
        author = f"Avery Author{pep} <author{pep}@lists.example>"
        planted_spec = _planted_for(spec, index)
        label = planted_spec.label
        final_state = LABEL_STATES[label]
        role = planted_spec.author_role or LABEL_ROLES[label]
        days_offset = (planted_spec.days_offset
                       if planted_spec.days_offset is not None
                       else rng.randint(-7, 7))
        template = planted_spec.template or TEMPLATES[label]
        planted_text = _instantiate_template(template, pep, title, lexicon, rng)

        decisive = _BASE_DECISIVE + timedelta(days=index * _PEP_SPACING_DAYS)
        draft_date = decisive - timedelta(days=180)
        for when, status in ((draft_date, "Draft"),
                             (decisive, final_state.capitalize())):
            token = f"{pep}-{status}-{when.isoformat()}"
            commit = hashlib.sha1(token.encode("utf-8")).hexdigest()[:10]
            commit_rows.append((when.isoformat(), pep, status, commit))

        needs_delegate = role == "bdfl_delegate" or index % 3 == 0
        doc_lines = [
            f"PEP: {pep}",
            f"Title: {title}",
            f"Author: {author}",
            f"Status: {final_state.capitalize()}",
        ]
        if needs_delegate:
            doc_lines.append(f"BDFL-Delegate: {DELEGATE_IDENTITY}")
        doc_lines += [
            f"Created: {draft_date.date().isoformat()}",
            "",
            f"This document proposes the {title.lower()} work.",
            "",
        ]
        pep_path = pep_dir / f"pep-{pep:04d}.txt"
        pep_path.write_text("\n".join(doc_lines), encoding="utf-8", newline="\n")
        pep_paths.append(pep_path)

        n_messages = rng.randint(*spec.messages_per_pep)
        planted_at = rng.randrange(n_messages)
        subject = f"PEP {pep}: {title}"
        root_id: str | None = None
        messages: list[tuple[datetime, str]] = []

        for m in range(n_messages):
            message_id = f"synth-{pep}-{m:03d}@lists.example"
            if m == 0:
                root_id = message_id
            n_noise = rng.randint(*spec.noise_sentences_per_message)
            if m == planted_at:
                identity = _role_identity(role, author, rng)
                date = decisive + timedelta(days=days_offset)
                paragraphs = _noise_paragraphs(
                    rng, n_noise, adversarial_pool, spec.adversarial_rate)
                insert_at = len(paragraphs) // 2 if paragraphs else 0
                paragraphs.insert(insert_at, planted_text)
                planted_out.append(PlantedSentence(
                    pep=pep, label=label, final_state=final_state,
                    message_id=message_id, text=planted_text,
                    author_role=role, days_offset=days_offset,
                ))
                gt_rows.append((pep, final_state, message_id, planted_text, label))
            else:
                noise_role = rng.choice(("core_developer", "other", "other"))
                identity = _role_identity(noise_role, author, rng)
                date = decisive + timedelta(
                    days=rng.randint(-100, 100),
                    hours=rng.randint(-4, 6),
                    minutes=rng.choice((0, 15, 30, 45)),
                )
                paragraphs = _noise_paragraphs(
                    rng, n_noise, adversarial_pool, spec.adversarial_rate)
            rendered = _render_message(
                envelope_email=_identity_email(identity),
                identity=identity,
                subject=subject,
                date=date,
                message_id=message_id,
                in_reply_to=None if m == 0 else root_id,
                paragraphs=paragraphs,
            )
            messages.append((date, rendered))

        for _, rendered in sorted(messages, key=lambda item: item[0]):
            mbox_chunks.append(rendered)

    mbox_path = out_dir / "discussions.mbox"
    mbox_path.write_text("\n".join(mbox_chunks), encoding="utf-8", newline="\n")

    commits_path = out_dir / "commits.csv"
    with commits_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("date,pep,status,commit\n")
        for when, pep, status, commit in sorted(commit_rows):
            fh.write(f"{when},{pep},{status},{commit}\n")

    ground_truth_path = out_dir / "ground_truth.csv"
    with ground_truth_path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("pep,final_state,message_id,sentence_text,label\n")
        for pep, state, mid, text, label in gt_rows:
            quoted = '"' + text.replace('"', '""') + '"'
            fh.write(f"{pep},{state},{mid},{quoted},{label}\n")

    roster_path = out_dir / "roster.json"
    roster_path.write_text(json.dumps({
        "bdfl": [BDFL_IDENTITY],
        "core_developers": list(CORE_IDENTITIES),
        "pep_editors": [EDITOR_IDENTITY],
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")

    spec_path = out_dir / "synth_spec.json"
    spec_path.write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True)
                         + "\n", encoding="utf-8", newline="\n")

    return SynthResult(
        out_dir=out_dir,
        mbox_path=mbox_path,
        pep_paths=pep_paths,
        commits_path=commits_path,
        ground_truth_path=ground_truth_path,
        roster_path=roster_path,
        spec_path=spec_path,
        planted=planted_out,
    )
