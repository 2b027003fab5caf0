"""Idea records, their tokenized text form, and ground-truth labels.

Input is newline-delimited JSON (one record per line) or a single JSON
array.  Records are immutable after parsing and safe to share between
threads.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import re
from dataclasses import dataclass, field

from .lingua import Dictionaries, Token, remove_html_tags, tokenize

__all__ = [
    "Status", "Label", "CommentRecord", "IdeaRecord", "Sentence", "IdeaText",
    "ParseResult", "RecordError", "parse_corpus", "parse_record", "to_idea_text",
    "label_from_status", "derive_serial_flags", "load_fixture", "FixtureRow",
]


class Status(enum.Enum):
    NEW = "New"
    ACKNOWLEDGED = "Acknowledged"
    ALREADY_OFFERED = "AlreadyOffered"
    UNDER_REVIEW = "UnderReview"
    IMPLEMENTED = "Implemented"
    PARTIALLY_IMPLEMENTED = "PartiallyImplemented"
    NOT_PLANNED = "NotPlanned"
    ARCHIVED = "Archived"

    @classmethod
    def parse(cls, raw: str) -> "Status":
        key = re.sub(r"[\s_\-]", "", raw).lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown status {raw!r}")


class Label(enum.IntEnum):
    NOT_POTENTIAL = 0
    POTENTIAL = 1


# Statuses that settle an idea's fate; the rest carry no usable label.
_POTENTIAL = {Status.IMPLEMENTED, Status.PARTIALLY_IMPLEMENTED, Status.UNDER_REVIEW}
_NOT_POTENTIAL = {Status.ARCHIVED, Status.NOT_PLANNED}


def label_from_status(status: Status) -> Label | None:
    if status in _POTENTIAL:
        return Label.POTENTIAL
    if status in _NOT_POTENTIAL:
        return Label.NOT_POTENTIAL
    return None


@dataclass(frozen=True)
class CommentRecord:
    author_id: str
    date: dt.date
    text: str = ""
    author_role: str = "normal"      # "expert" or "normal"


@dataclass(frozen=True)
class IdeaRecord:
    id: str
    title: str
    body: str = ""
    posted_date: dt.date | None = None
    owner_id: str = ""
    owner_is_serial: bool | None = None
    status: Status = Status.NEW
    votes: int = 0
    comments: tuple[CommentRecord, ...] = ()
    category: str = ""
    pretagged_title: str | None = None   # optional "word/TAG ..." channel

    def label(self) -> Label | None:
        return label_from_status(self.status)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def words(self) -> list[str]:
        return [t.word for t in self.tokens]


@dataclass(frozen=True)
class IdeaText:
    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def title(self) -> Sentence:
        return self.sentences[0]

    def all_tokens(self):
        for sentence in self.sentences:
            yield from sentence.tokens


@dataclass(frozen=True)
class RecordError:
    record_id: str
    message: str


@dataclass
class ParseResult:
    records: list[IdeaRecord] = field(default_factory=list)
    errors: list[RecordError] = field(default_factory=list)


def _parse_date(raw) -> dt.date:
    return dt.date.fromisoformat(str(raw))


def _parse_comment(raw: dict) -> CommentRecord:
    role = str(raw.get("author_role", "normal")).lower()
    if role not in ("expert", "normal"):
        role = "normal"
    return CommentRecord(
        author_id=str(raw.get("author_id", "")),
        date=_parse_date(raw["date"]),
        text=str(raw.get("text", "")),
        author_role=role,
    )


def parse_record(raw: dict) -> IdeaRecord:
    """One IdeaRecord from a parsed JSON object; raises ValueError on
    schema violations."""
    record_id = str(raw.get("id", "")).strip()
    if not record_id:
        raise ValueError("record is missing an id")
    for required in ("title", "status"):
        if required not in raw:
            raise ValueError(f"record {record_id} is missing field {required!r}")
    posted = _parse_date(raw["posted_date"]) if raw.get("posted_date") else None
    comments = tuple(_parse_comment(c) for c in raw.get("comments", []))
    if posted is not None:
        for c in comments:
            if c.date < posted:
                raise ValueError(
                    f"record {record_id}: comment dated {c.date} precedes posted_date {posted}"
                )
    serial = raw.get("owner_is_serial")
    return IdeaRecord(
        id=record_id,
        title=str(raw["title"]),
        body=str(raw.get("body", "")),
        posted_date=posted,
        owner_id=str(raw.get("owner_id", "")),
        owner_is_serial=None if serial is None else bool(serial),
        status=Status.parse(str(raw["status"])),
        votes=int(raw.get("votes", 0)),
        comments=comments,
        category=str(raw.get("category", "")),
        pretagged_title=raw.get("pretagged_title"),
    )


def parse_corpus(source) -> ParseResult:
    """Parse a corpus from a file path, file object, or raw string.
    Malformed records land in .errors instead of being dropped silently."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except (OSError, ValueError):
            if isinstance(source, str) and ("\n" in source or source.lstrip()[:1] in ("[", "{")):
                text = source
            else:
                raise
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    result = ParseResult()
    stripped = text.strip()
    if not stripped:
        return result

    if stripped.startswith("["):
        raw_records = json.loads(stripped)
        entries = [(i, r) for i, r in enumerate(raw_records, start=1)]
    else:
        entries = []
        for lineno, line in enumerate(stripped.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entries.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                result.errors.append(RecordError(f"line {lineno}", f"invalid JSON: {exc}"))

    for where, raw in entries:
        try:
            result.records.append(parse_record(raw))
        except (ValueError, KeyError, TypeError) as exc:
            rid = str(raw.get("id", f"entry {where}")) if isinstance(raw, dict) else f"entry {where}"
            result.errors.append(RecordError(rid, str(exc)))
    return result


def derive_serial_flags(records: list[IdeaRecord]) -> list[IdeaRecord]:
    """Fill missing owner_is_serial flags: an owner is serial for a given
    idea when they have an Implemented idea posted strictly earlier.
    Supplied flags are left untouched."""
    import dataclasses

    implemented: dict[str, list[dt.date]] = {}
    for r in records:
        if r.status is Status.IMPLEMENTED and r.owner_id and r.posted_date:
            implemented.setdefault(r.owner_id, []).append(r.posted_date)

    out = []
    for r in records:
        if r.owner_is_serial is None:
            earlier = implemented.get(r.owner_id, [])
            flag = any(d < r.posted_date for d in earlier) if r.posted_date else False
            r = dataclasses.replace(r, owner_is_serial=flag)
        out.append(r)
    return out


_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def split_sentences(body: str) -> list[str]:
    parts = [p.strip() for p in _SENTENCE_SPLIT.split(body)]
    return [p for p in parts if p]


def to_idea_text(record: IdeaRecord, dicts: Dictionaries) -> IdeaText:
    """Tokenize and tag an idea: sentence 1 is the title, body sentences
    follow in order.  HTML is stripped from the body before splitting."""
    if not record.title.strip():
        raise ValueError(f"idea {record.id} has an empty title")

    if record.pretagged_title:
        from .lingua import parse_pretagged

        title_tokens = [Token(w, t) for w, t in parse_pretagged(record.pretagged_title)]
    else:
        title_tokens = dicts.title_tokens(record.title)
    sentences = [Sentence(tuple(title_tokens))]

    body = remove_html_tags(record.body) if record.body else ""
    for raw_sentence in split_sentences(body):
        words = tokenize(raw_sentence)
        if words:
            sentences.append(Sentence(tuple(dicts.penn_tag(words))))
    return IdeaText(tuple(sentences))


@dataclass(frozen=True)
class FixtureRow:
    """One row of the packaged 10-idea measurement fixture."""

    id: str
    refined_rt: str
    refined_kt: str
    rel: float
    vote: int
    type: int
    div: float
    con: float
    epr: int
    label: int


def load_fixture(path) -> list[FixtureRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split("\t")
        expected = ["id", "refined_rt", "refined_kt", "rel", "vote", "type",
                    "div", "con", "epr", "label"]
        if header != expected:
            raise ValueError(f"unexpected fixture header: {header}")
        for line in fh:
            if not line.strip():
                continue
            f = line.rstrip("\n").split("\t")
            rows.append(FixtureRow(
                id=f[0], refined_rt=f[1], refined_kt=f[2],
                rel=float(f[3]), vote=int(f[4]), type=int(f[5]),
                div=float(f[6]), con=float(f[7]), epr=int(f[8]),
                label=int(f[9]),
            ))
    return rows
