"""Numeric measurements for one idea and the model input vector.

Relevance combines term counts, search-trend interest of the request
terms, scope weights of the known terms, and how evenly the two lists
balance.  Interest comes from votes, owner history, comment entropy,
comment spacing, and expert attention.  The vector layout is
<1, rel, vote, type, epr, div, con>.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .corpus import CommentRecord, IdeaRecord
from .extraction import Term, TermsList
from .lingua import Dictionaries

__all__ = [
    "TrendSeries", "FileTrendProvider", "MissingTrendError", "Measurements",
    "trend", "scope", "balance", "relevance", "diversity", "concern",
    "expert_interest", "vote_of", "user_type", "feature_vector",
    "measure_idea", "ScopeWeights", "LOG_ADJUST",
]

# ln(1.72 + 1) is close to 1, so a perfectly balanced list leaves the
# trend/scope ratio nearly untouched.
LOG_ADJUST = 1.72

N_FEATURES = 7


class MissingTrendError(LookupError):
    def __init__(self, term: str, detail: str = ""):
        self.term = term
        super().__init__(f"no usable trend series for {term!r}" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class TrendSeries:
    term: str
    points: tuple[tuple[str, int], ...]   # (YYYY-MM, value 0..100), increasing

    def __post_init__(self):
        periods = [p for p, _ in self.points]
        if periods != sorted(periods) or len(set(periods)) != len(periods):
            raise ValueError(f"periods for {self.term!r} must be strictly increasing")
        for _, v in self.points:
            if not 0 <= v <= 100:
                raise ValueError(f"trend value {v} for {self.term!r} outside [0, 100]")


class FileTrendProvider:
    """Monthly search-interest series read from a CSV of
    term,period,value rows."""

    def __init__(self, series: dict[str, TrendSeries]):
        self._series = {k.lower(): v for k, v in series.items()}

    @classmethod
    def load(cls, path) -> "FileTrendProvider":
        collected: dict[str, list[tuple[str, int]]] = {}
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                collected.setdefault(row["term"].strip().lower(), []).append(
                    (row["period"].strip(), int(row["value"]))
                )
        series = {
            term: TrendSeries(term, tuple(sorted(points)))
            for term, points in collected.items()
        }
        return cls(series)

    def series_for(self, term: str) -> TrendSeries | None:
        return self._series.get(term.lower())

    def resolve(self, term: str) -> TrendSeries | None:
        """Find a series for the term, refining the query on a miss:
        full surface first, then token prefixes from longest to shortest
        (the final fallback being the head modifier token alone)."""
        hit = self.series_for(term)
        if hit:
            return hit
        words = term.split()
        for cut in range(len(words) - 1, 0, -1):
            hit = self.series_for(" ".join(words[:cut]))
            if hit:
                return hit
        return None


def trend(term: str, as_of: str, d: int, provider: FileTrendProvider) -> float:
    """Mean of the last d values at or before the as_of period."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    series = provider.resolve(term)
    if series is None:
        raise MissingTrendError(term)
    usable = [v for period, v in series.points if period <= as_of]
    if len(usable) < d:
        raise MissingTrendError(term, f"needs {d} points at or before {as_of}, has {len(usable)}")
    return sum(usable[-d:]) / d


# ---------------------------------------------------------------------------
# scope weights

_LEVEL_BY_CODE = {1: "Product", 2: "ProductLine", 3: "GeneralCase", 4: "Unknown"}

_SETTING_RANGES = {
    2: {"Product": (1, 10), "ProductLine": (11, 20), "GeneralCase": (21, 30), "Unknown": (31, 40)},
    3: {"Product": (1, 25), "ProductLine": (26, 50), "GeneralCase": (51, 75), "Unknown": (76, 100)},
}

UNKNOWN_LEVEL_CODE = 4


class ScopeWeights:
    """Per-token scope weights under one of the three weight settings.

    Setting 1 uses the dictionary codes directly (1/2/3/4); settings 2
    and 3 draw one weight per scope level from the corresponding discrete
    uniform range, fixed for the lifetime of this object."""

    def __init__(self, dicts: Dictionaries, setting: int = 1, rng=None):
        if setting not in (1, 2, 3):
            raise ValueError("setting must be 1, 2 or 3")
        self.setting = setting
        self._dicts = dicts
        if setting == 1:
            self._level_weights = {name: code for code, name in _LEVEL_BY_CODE.items()}
        else:
            if rng is None:
                raise ValueError(f"setting {setting} draws random weights and needs an rng")
            self._level_weights = {
                name: sample_scope_weight(setting, name, rng)
                for name in _LEVEL_BY_CODE.values()
            }

    def weight(self, word: str) -> int:
        code = self._dicts.known_weight(word, UNKNOWN_LEVEL_CODE)
        level = _LEVEL_BY_CODE.get(min(code, UNKNOWN_LEVEL_CODE), "Unknown")
        return self._level_weights[level]


def sample_scope_weight(setting: int, level: str, rng) -> int:
    """One scope weight for a level: fixed codes under setting 1,
    inclusive discrete-uniform draws under settings 2 and 3."""
    if setting == 1:
        for code, name in _LEVEL_BY_CODE.items():
            if name == level:
                return code
        raise ValueError(f"unknown scope level {level!r}")
    try:
        lo, hi = _SETTING_RANGES[setting][level]
    except KeyError:
        raise ValueError(f"unknown setting/level: {setting}/{level!r}") from None
    return int(rng.integers(lo, hi + 1))


def scope(kt: Term | str, weights: ScopeWeights) -> int:
    """Scope of change of a known term: its token weight, or the minimum
    across tokens for multi-word terms."""
    words = kt.split() if isinstance(kt, str) else [t.word for t in kt.tokens]
    if not words:
        raise ValueError("scope needs a non-empty term")
    return min(weights.weight(w) for w in words)


def balance(v: TermsList) -> float:
    """How evenly the terms split between requests and knowns, in [0, 1].
    An empty list measures 0."""
    surfaces = set(v.request_surfaces()) | set(v.known_surfaces())
    p = len(surfaces)
    if p == 0:
        return 0.0
    q = len(set(v.request_surfaces()))
    if q >= p / 2:
        return 2.0 * (p - q) / p
    return 2.0 * q / p


def relevance(v: TermsList, trends: list[float], scopes: list[float],
              c: float = LOG_ADJUST) -> float:
    """(|known|/|request|) * (sum of request trends / sum of known
    scopes) * ln(c + balance).  Zero when either list is empty."""
    n_rt = len(v.request_terms)
    n_kt = len(v.known_terms)
    if n_rt == 0 or n_kt == 0:
        return 0.0
    if len(trends) != n_rt or len(scopes) != n_kt:
        raise ValueError("need one trend per request term and one scope per known term")
    scope_sum = float(sum(scopes))
    if scope_sum <= 0:
        raise ValueError("scope weights must sum to a positive value")
    return (n_kt / n_rt) * (float(sum(trends)) / scope_sum) * math.log(c + balance(v))


def diversity(comments: list[CommentRecord] | tuple[CommentRecord, ...]) -> float:
    """Entropy (bits) of the per-commenter comment distribution; -1 when
    nobody commented."""
    counts: dict[str, int] = {}
    for c in comments:
        counts[c.author_id] = counts.get(c.author_id, 0) + 1
    n = len(counts)
    if n < 1:
        return -1.0
    total = len(comments)
    return -sum((k / total) * math.log2(k / total) for k in counts.values())


def concern(comments: list[CommentRecord] | tuple[CommentRecord, ...]) -> float:
    """Average days between first and last comment per gap; -1 with
    fewer than two comments."""
    n = len(comments)
    if n <= 1:
        return -1.0
    dates = sorted(c.date for c in comments)
    return (dates[-1] - dates[0]).days / (n - 1)


def expert_interest(comments) -> int:
    return sum(1 for c in comments if c.author_role == "expert")


def vote_of(record: IdeaRecord) -> int:
    return record.votes


def user_type(record: IdeaRecord) -> int:
    return 1 if record.owner_is_serial else 0


@dataclass(frozen=True)
class Measurements:
    rel: float
    vote: int
    type: int
    div: float
    con: float
    epr: int

    def __post_init__(self):
        if self.rel < 0:
            raise ValueError("relevance cannot be negative")
        if self.type not in (0, 1):
            raise ValueError("type must be 0 or 1")
        if self.div < -1 or self.con < -1:
            raise ValueError("diversity/concern are -1 or nonnegative")
        if self.epr < 0:
            raise ValueError("expert interest is a count")


def feature_vector(m: Measurements) -> tuple[float, ...]:
    """Model input <1, rel, vote, type, epr, div, con>."""
    return (1.0, float(m.rel), float(m.vote), float(m.type),
            float(m.epr), float(m.div), float(m.con))


def measure_idea(record: IdeaRecord, terms: TermsList,
                 provider: FileTrendProvider, weights: ScopeWeights,
                 d: int = 1, as_of: str | None = None,
                 missing_trend: str = "error") -> Measurements:
    """All six measurements for one idea.  The trend cut-off defaults to
    the posting month.  missing_trend="zero" scores relevance 0 when a
    request term has no usable series instead of raising."""
    if as_of is None:
        as_of = record.posted_date.strftime("%Y-%m") if record.posted_date else "9999-12"
    try:
        trends = [trend(t.surface, as_of, d, provider) for t in terms.request_terms]
        scopes = [scope(t, weights) for t in terms.known_terms]
        rel = relevance(terms, trends, scopes)
    except MissingTrendError:
        if missing_trend != "zero":
            raise
        rel = 0.0
    return Measurements(
        rel=rel,
        vote=vote_of(record),
        type=user_type(record),
        div=diversity(record.comments),
        con=concern(record.comments),
        epr=expert_interest(record.comments),
    )
