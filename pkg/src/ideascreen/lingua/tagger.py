"""Deterministic Penn Treebank tagger: lexicon lookup plus suffix rules.

Good enough for term extraction, which only needs the coarse
adjective/adverb/noun/cardinal classes.  A pre-tagged channel
("word/TAG word/TAG ...") bypasses the rules entirely so externally
tagged text can be fed through unchanged.
"""

from __future__ import annotations

import re

_WORD_TAG = re.compile(r"^(?P<word>.+)/(?P<tag>[A-Z$.,:()#]+)$")

# Tokens that consist only of symbols (what is left of a chunk once the
# title cleaner strips it) act as phrase boundaries.
SYMBOL_TAG = "SYM"

_DIGIT = re.compile(r"\d")


class Tagger:
    def __init__(self, lexicon: dict[str, str]):
        self.lexicon = {w.lower(): t for w, t in lexicon.items()}

    def tag_word(self, word: str) -> str:
        if not word or not any(ch.isalnum() for ch in word):
            return SYMBOL_TAG
        hit = self.lexicon.get(word.lower())
        if hit:
            return hit
        if _DIGIT.search(word):
            return "CD"
        if word.endswith("ly"):
            return "RB"
        if word.endswith("est") and len(word) > 4:
            return "JJS"
        if word[0].isupper():
            return "NNP"
        return "NN"

    def tag(self, words: list[str]) -> list[str]:
        return [self.tag_word(w) for w in words]


def parse_pretagged(line: str) -> list[tuple[str, str]]:
    """Parse one line of space-separated word/TAG pairs."""
    pairs = []
    for chunk in line.split():
        m = _WORD_TAG.match(chunk)
        if not m:
            raise ValueError(f"not a word/TAG pair: {chunk!r}")
        pairs.append((m.group("word"), m.group("tag")))
    return pairs


def load_lexicon(path) -> dict[str, str]:
    """Read a lexicon file of "word TAG" lines; '#' starts a comment."""
    lex: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            word, tag = line.split()
            lex[word.lower()] = tag
    return lex
