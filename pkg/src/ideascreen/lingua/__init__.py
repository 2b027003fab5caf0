"""Text primitives: cleaning, tokenization, tagging, stemming, dictionaries.

Everything here is a pure function over immutable inputs; the dictionary
bundle is loaded once and shared freely between threads.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .porter import stem
from .tagger import SYMBOL_TAG, Tagger, load_lexicon, parse_pretagged

__all__ = [
    "ADJECTIVE_TAGS", "ADVERB_TAGS", "NOUN_TAGS", "CARDINAL_TAGS",
    "TERM_TAGS", "Token", "Dictionaries", "LemmaTable",
    "clean_title", "tokenize", "remove_html_tags", "remove_stopwords",
    "filter_by_length", "stem", "parse_pretagged", "SYMBOL_TAG",
]

ADJECTIVE_TAGS = frozenset({"JJ", "JJR", "JJS"})
ADVERB_TAGS = frozenset({"RB", "RBR", "RBS"})
NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
CARDINAL_TAGS = frozenset({"CD", "POS"})

assert (
    len(ADJECTIVE_TAGS | ADVERB_TAGS | NOUN_TAGS | CARDINAL_TAGS)
    == len(ADJECTIVE_TAGS) + len(ADVERB_TAGS) + len(NOUN_TAGS) + len(CARDINAL_TAGS)
), "tag classes must be pairwise disjoint"

TERM_TAGS = ADJECTIVE_TAGS | ADVERB_TAGS | NOUN_TAGS | CARDINAL_TAGS


class Token(NamedTuple):
    word: str
    tag: str


_KEEP = re.compile(r"[^A-Za-z0-9 .'\-]")
_SPACES = re.compile(r"\s+")
_TRAILING_PUNCT = ".!?,;:"
_TAG_RE = re.compile(r"<[^<>]*>")


def clean_title(raw: str) -> str:
    """Drop characters other than letters, digits, space, dot, hyphen
    and apostrophe; collapse whitespace runs to single spaces."""
    cleaned = _KEEP.sub(" ", raw)
    return _SPACES.sub(" ", cleaned).strip()


def tokenize(text: str) -> list[str]:
    """Whitespace split with trailing sentence punctuation stripped.
    Hyphenated words stay whole."""
    out = []
    for chunk in text.split():
        word = chunk.rstrip(_TRAILING_PUNCT)
        if word:
            out.append(word)
    return out


def remove_html_tags(text: str) -> str:
    """Strip <...> spans and decode character entities.  A '<' without a
    closing '>' is left as literal text."""
    return html.unescape(_TAG_RE.sub(" ", text))


def remove_stopwords(words: list[str], stopwords: frozenset[str]) -> list[str]:
    return [w for w in words if w.lower() not in stopwords]


def filter_by_length(words: list[str], min_len: int = 2) -> list[str]:
    return [w for w in words if len(w) >= min_len]


@dataclass(frozen=True)
class LemmaTable:
    """Base forms for comparative/superlative adjectives and adverbs.
    The irregular table wins; otherwise -er/-est suffixes are stripped
    with consonant undoubling and -i → -y restoration."""

    irregular: dict[str, str] = field(default_factory=dict)

    def base_form(self, word: str) -> str:
        w = word.lower()
        hit = self.irregular.get(w)
        if hit:
            return hit
        for suffix in ("est", "er"):
            if w.endswith(suffix) and len(w) - len(suffix) >= 2:
                stem_ = w[: len(w) - len(suffix)]
                if len(stem_) >= 3 and stem_[-1] == stem_[-2] and stem_[-1] not in "aeiou":
                    return stem_[:-1]
                if stem_.endswith("i"):
                    return stem_[:-1] + "y"
                return stem_
        return w


def _load_wordlist(path: Path) -> frozenset[str]:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                words.add(line.lower())
    return frozenset(words)


def _load_weights(path: Path) -> dict[str, int]:
    weights: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            word, value = line.split("\t")
            weight = int(value)
            if weight < 1:
                raise ValueError(f"weight for {word!r} must be >= 1, got {weight}")
            weights[word.lower()] = weight
    return weights


def _load_lemmas(path: Path) -> LemmaTable:
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            form, base = line.split("\t")
            table[form.lower()] = base.lower()
    return LemmaTable(irregular=table)


def default_dict_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "data"


@dataclass(frozen=True)
class Dictionaries:
    """The three extraction dictionaries plus lemma table and tagger."""

    modifiers: frozenset[str]        # characteristic adjectives/adverbs
    stopwords: frozenset[str]
    known_weights: dict[str, int]    # firm vocabulary with scope weights
    lemmas: LemmaTable
    tagger: Tagger

    @classmethod
    def load(cls, dict_dir: str | Path | None = None) -> "Dictionaries":
        base = Path(dict_dir) if dict_dir else default_dict_dir()
        return cls(
            modifiers=_load_wordlist(base / "E.dict"),
            stopwords=_load_wordlist(base / "S.dict"),
            known_weights=_load_weights(base / "K.dict"),
            lemmas=_load_lemmas(base / "lemma.tsv"),
            tagger=Tagger(load_lexicon(base / "tags.lex")),
        )

    def base_form(self, word: str) -> str:
        return self.lemmas.base_form(word)

    def is_known(self, word: str) -> bool:
        return word.lower() in self.known_weights

    def known_weight(self, word: str, default: int | None = None) -> int | None:
        return self.known_weights.get(word.lower(), default)

    def penn_tag(self, words: list[str]) -> list[Token]:
        return [Token(w, self.tagger.tag_word(w)) for w in words]

    def title_tokens(self, raw_title: str) -> list[Token]:
        """Clean, tokenize and tag a title.  Chunks that are pure
        punctuation (slashes and the like) survive as boundary tokens so
        they still separate noun runs downstream."""
        tokens: list[Token] = []
        for chunk in raw_title.split():
            cleaned = clean_title(chunk)
            word = cleaned.rstrip(_TRAILING_PUNCT).strip()
            if word:
                tokens.append(Token(word, self.tagger.tag_word(word)))
            elif chunk:
                tokens.append(Token(chunk, SYMBOL_TAG))
        return tokens
