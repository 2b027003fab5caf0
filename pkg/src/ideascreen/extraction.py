"""Request-term and known-term extraction.

Titles with at least two words go through the title extractor: trigger
words ("for"/"into", "need"/"offer") split the title into a request side
and a known side; otherwise noun phrases are collected from the whole
title and routed by dictionary membership.  Short-titled ideas fall back
to the whole-idea extractor, which pairs adjacent high-frequency stems.
Both paths end with a refinement pass that moves dictionary terms into
the known list.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import IdeaText
from .lingua import (
    ADJECTIVE_TAGS,
    ADVERB_TAGS,
    CARDINAL_TAGS,
    NOUN_TAGS,
    TERM_TAGS,
    Dictionaries,
    Token,
    filter_by_length,
    remove_stopwords,
    stem,
)

__all__ = ["Term", "TermsList", "word_frequency", "create_request_terms",
           "create_known_terms", "extract_idea_title", "extract_whole_idea",
           "refine_terms", "extract_terms"]

_MODIFIER_TAGS = ADJECTIVE_TAGS | ADVERB_TAGS
_RUN_TAGS = NOUN_TAGS | CARDINAL_TAGS

CASE1_TRIGGERS = frozenset({"for", "into"})
CASE2_TRIGGERS = frozenset({"need", "offer"})


@dataclass(frozen=True)
class Term:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("a term needs at least one token")
        bad = [t for t in self.tokens if t.tag not in TERM_TAGS]
        if bad:
            raise ValueError(f"term tokens carry non-term tags: {bad}")

    @property
    def surface(self) -> str:
        return " ".join(t.word.lower() for t in self.tokens)

    def has_modifier_tag(self) -> bool:
        return any(t.tag in _MODIFIER_TAGS for t in self.tokens)


@dataclass(frozen=True)
class TermsList:
    request_terms: tuple[Term, ...] = ()
    known_terms: tuple[Term, ...] = ()

    def request_surfaces(self) -> list[str]:
        return [t.surface for t in self.request_terms]

    def known_surfaces(self) -> list[str]:
        return [t.surface for t in self.known_terms]

    def is_empty(self) -> bool:
        return not self.request_terms and not self.known_terms


def word_frequency(idea: IdeaText) -> dict[str, int]:
    """Case-insensitive occurrence counts over the whole idea text."""
    counts: Counter[str] = Counter()
    for token in idea.all_tokens():
        if any(ch.isalnum() for ch in token.word):
            counts[token.word.lower()] += 1
    return dict(counts)


def _dedupe(terms: list[Term]) -> list[Term]:
    seen: set[str] = set()
    out = []
    for t in terms:
        if t.surface not in seen:
            seen.add(t.surface)
            out.append(t)
    return out


def _term_in_known(term: Term, dicts: Dictionaries) -> bool:
    """Whole-surface dictionary hit, else every token resolvable."""
    if dicts.is_known(term.surface):
        return True
    return all(dicts.is_known(t.word) for t in term.tokens)


def create_request_terms(tokens: list[Token], start: int, end: int,
                         dicts: Dictionaries) -> list[Term]:
    """Noun/cardinal runs between start and end (1-based, inclusive),
    each prefixed by the characteristic modifiers seen before the run
    started; bare runs are kept when no modifier precedes them.
    Adjectives and adverbs are base-formed and checked against the
    modifier dictionary; runs whose whole surface is a stop-word are
    dropped."""
    modifiers: list[tuple[Token, int]] = []
    runs: list[tuple[list[Token], int]] = []
    tmp: list[Token] = []
    tmp_start = 0

    def flush():
        nonlocal tmp
        if tmp:
            surface = " ".join(t.word.lower() for t in tmp)
            if surface not in dicts.stopwords:
                runs.append((tmp, tmp_start))
        tmp = []

    for i in range(start, end + 1):
        if not 1 <= i <= len(tokens):
            continue
        token = tokens[i - 1]
        if token.tag in _MODIFIER_TAGS:
            base = dicts.base_form(token.word)
            if base in dicts.modifiers:
                modifiers.append((Token(base, token.tag), i))
        elif token.tag in _RUN_TAGS:
            if not tmp:
                tmp_start = i
            tmp.append(token)
        else:
            flush()
        if i >= end:
            flush()

    terms: list[Term] = []
    for run, run_start in runs:
        attached = False
        for mod_token, mod_pos in modifiers:
            if mod_pos < run_start:
                terms.append(Term((mod_token, *run)))
                attached = True
        if not attached:
            terms.append(Term(tuple(run)))
    return _dedupe(terms)


def create_known_terms(tokens: list[Token], start: int, end: int,
                       dicts: Dictionaries) -> list[Term]:
    """Noun/cardinal runs between start and end (1-based, inclusive).
    Adjectives and adverbs neither extend nor break a run; any other tag
    ends it.  Runs equal to a stop-word are dropped."""
    runs: list[Term] = []
    tmp: list[Token] = []

    def flush():
        nonlocal tmp
        if tmp:
            surface = " ".join(t.word.lower() for t in tmp)
            if surface not in dicts.stopwords:
                runs.append(Term(tuple(tmp)))
        tmp = []

    for i in range(start, end + 1):
        if not 1 <= i <= len(tokens):
            continue
        token = tokens[i - 1]
        if token.tag in TERM_TAGS:
            if token.tag in _RUN_TAGS:
                tmp.append(token)
        else:
            flush()
        if i >= end:
            flush()
    return _dedupe(runs)


def _word_count(tokens) -> int:
    return sum(1 for t in tokens if any(ch.isalnum() for ch in t.word))


def extract_idea_title(idea: IdeaText, dicts: Dictionaries) -> TermsList:
    """Title-based extraction for titles of two or more words."""
    tokens = list(idea.title.tokens)
    if _word_count(tokens) < 2:
        raise ValueError("title extraction needs a title of at least two words")

    words = [t.word.lower() for t in tokens]
    flag1 = next((i for i, w in enumerate(words, start=1) if w in CASE1_TRIGGERS), None)
    flag2 = next((i for i, w in enumerate(words, start=1) if w in CASE2_TRIGGERS), None)

    if flag1 is not None:
        rt = create_request_terms(tokens, 1, flag1 - 1, dicts)
        kt = create_known_terms(tokens, flag1 + 1, len(tokens), dicts)
    elif flag2 is not None:
        rt = create_request_terms(tokens, flag2 + 1, len(tokens), dicts)
        kt = create_known_terms(tokens, 1, flag2 - 1, dicts)
    else:
        rt, kt = [], []
        for term in create_request_terms(tokens, 1, len(tokens), dicts):
            if _term_in_known(term, dicts):
                kt.append(term)
            else:
                rt.append(term)
    return TermsList(tuple(_dedupe(rt)), tuple(_dedupe(kt)))


def _processed_stream(idea: IdeaText, dicts: Dictionaries) -> list[str]:
    """Lowercased, stop-word-filtered, length-filtered, stemmed words of
    the whole idea (HTML was stripped during tokenization)."""
    words = [t.word.lower() for t in idea.all_tokens()
             if any(ch.isalnum() for ch in t.word)]
    words = remove_stopwords(words, dicts.stopwords)
    words = filter_by_length(words, 2)
    return [stem(w) for w in words]


def extract_whole_idea(idea: IdeaText, dicts: Dictionaries) -> TermsList:
    """Fallback extraction over the whole idea: words with frequency above
    one become keywords; adjacent keyword pairs form two-word terms routed
    by dictionary membership; leftover single-occurrence dictionary words
    join the known list."""
    stream = _processed_stream(idea, dicts)
    wf = Counter(stream)

    rt: list[Term] = []
    kt: list[Term] = []
    for left, right in zip(stream, stream[1:]):
        if left == right or wf[left] < 2 or wf[right] < 2:
            continue
        term = Term((Token(left, "NN"), Token(right, "NN")))
        if _term_in_known(term, dicts):
            kt.append(term)
        else:
            rt.append(term)

    seen: set[str] = set()
    for word in stream:
        if wf[word] == 1 and word not in seen:
            seen.add(word)
            if dicts.is_known(word):
                kt.append(Term((Token(word, "NN"),)))
    return TermsList(tuple(_dedupe(rt)), tuple(_dedupe(kt)))


def _known_word_sweep(title_tokens, dicts: Dictionaries) -> list[Term]:
    """Collect every title word that resolves in the known dictionary,
    directly or through its stem."""
    found: list[Term] = []
    for token in title_tokens:
        if not any(ch.isalnum() for ch in token.word):
            continue
        tag = token.tag if token.tag in TERM_TAGS else "NN"
        word = token.word.lower()
        if dicts.is_known(word):
            found.append(Term((Token(word, tag),)))
        elif dicts.is_known(stem(word)):
            found.append(Term((Token(stem(word), tag),)))
    return _dedupe(found)


def refine_terms(v: TermsList, dicts: Dictionaries,
                 title_tokens=None) -> TermsList:
    """Move request terms that resolve in the known dictionary into the
    known list (terms carrying adjective/adverb tokens stay put), drop
    duplicates across lists, and, when the known list came out empty,
    sweep the title for dictionary words."""
    kt = list(v.known_terms)
    rt = []
    for term in v.request_terms:
        if _term_in_known(term, dicts) and not term.has_modifier_tag():
            kt.append(term)
        else:
            rt.append(term)

    kt = _dedupe(kt)
    known_surfaces = {t.surface for t in kt}
    rt = [t for t in _dedupe(rt) if t.surface not in known_surfaces]

    if not kt and title_tokens is not None:
        kt = _known_word_sweep(title_tokens, dicts)
    return TermsList(tuple(rt), tuple(kt))


def extract_terms(idea: IdeaText, dicts: Dictionaries) -> TermsList:
    """Title extraction when the title has two or more words, whole-idea
    extraction otherwise; always followed by refinement."""
    title_tokens = list(idea.title.tokens)
    if _word_count(title_tokens) >= 2:
        v = extract_idea_title(idea, dicts)
    else:
        v = extract_whole_idea(idea, dicts)
    return refine_terms(v, dicts, title_tokens=title_tokens)
