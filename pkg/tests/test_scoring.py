import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ideascreen.corpus import CommentRecord, IdeaRecord
from ideascreen.extraction import Term, TermsList
from ideascreen.lingua import Token
from ideascreen.scoring import (
    LOG_ADJUST,
    FileTrendProvider,
    Measurements,
    MissingTrendError,
    ScopeWeights,
    balance,
    concern,
    diversity,
    expert_interest,
    feature_vector,
    relevance,
    sample_scope_weight,
    scope,
    trend,
    user_type,
    vote_of,
)

import datetime as dt


def term(*words, tag="NN"):
    return Term(tuple(Token(w, tag) for w in words))


def terms_list(rt=(), kt=()):
    return TermsList(
        request_terms=tuple(term(*s.split()) for s in rt),
        known_terms=tuple(term(*s.split()) for s in kt),
    )


@pytest.fixture(scope="module")
def provider(trends_path):
    return FileTrendProvider.load(trends_path)


@pytest.fixture(scope="module")
def weights(dicts):
    return ScopeWeights(dicts, setting=1)


class TestTrend:
    def test_last_point(self, provider):
        assert trend("anti-microbial", "2007-05", 1, provider) == 72

    def test_nine_point_mean(self, provider):
        value = trend("anti-microbial", "2007-05", 9, provider)
        assert value == pytest.approx(689 / 9, abs=1e-9)

    def test_constant_series(self):
        from ideascreen.scoring import TrendSeries

        p = FileTrendProvider({"flat": TrendSeries("flat", tuple(
            (f"2007-0{m}", 55) for m in range(1, 8)))})
        for d in (1, 3, 7):
            assert trend("flat", "2007-07", d, p) == 55

    def test_query_refinement_longest_prefix(self, provider):
        assert trend("anti-microbial keyboard", "2007-05", 1, provider) == 72

    def test_unknown_term_raises(self, provider):
        with pytest.raises(MissingTrendError):
            trend("zorkmid blaster", "2007-05", 1, provider)

    def test_insufficient_points_raises(self, provider):
        with pytest.raises(MissingTrendError):
            trend("anti-microbial", "2006-09", 3, provider)

    def test_as_of_cutoff(self, provider):
        assert trend("anti-microbial", "2006-12", 1, provider) == 100

    def test_d_must_be_positive(self, provider):
        with pytest.raises(ValueError):
            trend("anti-microbial", "2007-05", 0, provider)


class TestScope:
    def test_keyboard(self, weights):
        assert scope("keyboard", weights) == 3

    def test_min_over_tokens(self, weights):
        assert scope("Dell XCD35", weights) == 1

    def test_single_token_weight(self, weights):
        assert scope("xps", weights) == 2
        assert scope("dell", weights) == 4

    def test_unknown_token_gets_catchall_weight(self, weights):
        assert scope("zorkmid", weights) == 4

    def test_term_object_accepted(self, weights):
        assert scope(term("dell", "xcd35"), weights) == 1


class TestBalance:
    def test_ex1(self):
        assert balance(terms_list(rt=["anti-microbial keyboard"], kt=["keyboard"])) == 1.0

    def test_no_requests(self):
        assert balance(terms_list(kt=["keyboard", "dell"])) == 0.0

    def test_one_of_four(self):
        v = terms_list(rt=["alpha beta"], kt=["gamma", "delta", "epsilon"])
        assert balance(v) == pytest.approx(0.5)

    def test_empty(self):
        assert balance(terms_list()) == 0.0

    @given(st.integers(0, 8), st.integers(0, 8))
    def test_range(self, n_rt, n_kt):
        v = terms_list(
            rt=[f"req{i}" for i in range(n_rt)],
            kt=[f"kno{i}" for i in range(n_kt)],
        )
        assert 0.0 <= balance(v) <= 1.0


class TestRelevance:
    def test_worked_value(self):
        v = terms_list(rt=["anti-microbial keyboard"], kt=["keyboard"])
        assert relevance(v, trends=[30.0], scopes=[3.0]) == pytest.approx(10.00632, abs=1e-4)

    def test_empty_lists_zero(self):
        assert relevance(terms_list(), trends=[], scopes=[]) == 0.0
        assert relevance(terms_list(rt=["a b"]), trends=[30.0], scopes=[]) == 0.0

    def test_two_requests_one_known(self):
        v = terms_list(rt=["other term", "second term"], kt=["gadget"])
        got = relevance(v, trends=[30.0, 10.0], scopes=[2.0])
        expected = 0.5 * 20.0 * math.log(LOG_ADJUST + 2.0 / 3.0)
        assert got == pytest.approx(expected, abs=1e-9)
        assert got == pytest.approx(8.70, abs=5e-3)   # exact value 8.69898

    def test_homogeneous_in_trends(self):
        v = terms_list(rt=["one term", "two term"], kt=["keyboard"])
        base = relevance(v, trends=[12.0, 5.0], scopes=[3.0])
        for lam in (0.5, 2.0, 7.5):
            scaled = relevance(v, trends=[12.0 * lam, 5.0 * lam], scopes=[3.0])
            assert scaled == pytest.approx(lam * base, rel=1e-12)

    def test_mismatched_lengths_raise(self):
        v = terms_list(rt=["a b"], kt=["c"])
        with pytest.raises(ValueError):
            relevance(v, trends=[], scopes=[3.0])


def comments(*entries):
    out = []
    for author, day, role in entries:
        out.append(CommentRecord(author_id=author, date=dt.date(2008, 9, day),
                                 author_role=role))
    return out


class TestDiversity:
    def test_two_users_one_each(self):
        assert diversity(comments(("a", 5, "expert"), ("b", 5, "normal"))) == 1.0

    def test_single_user(self):
        assert diversity(comments(("a", 1, "normal"), ("a", 2, "normal"))) == 0.0

    def test_no_comments(self):
        assert diversity([]) == -1.0

    @given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=25))
    def test_bounded_by_log_n(self, authors):
        cs = [CommentRecord(author_id=a, date=dt.date(2008, 1, 1)) for a in authors]
        n = len(set(authors))
        d = diversity(cs)
        assert d <= math.log2(n) + 1e-12
        counts = set(Counter(authors).values())
        if len(counts) == 1:
            assert d == pytest.approx(math.log2(n))


class TestConcern:
    def test_same_day(self):
        assert concern(comments(("a", 5, "expert"), ("b", 5, "normal"))) == 0.0

    def test_few_comments(self):
        assert concern([]) == -1.0
        assert concern(comments(("a", 5, "normal"))) == -1.0

    def test_three_over_ten_days(self):
        assert concern(comments(("a", 1, "normal"), ("b", 4, "normal"),
                                ("c", 11, "normal"))) == 5.0

    def test_nonnegative_with_two_or_more(self):
        assert concern(comments(("a", 3, "normal"), ("b", 9, "normal"))) >= 0.0


class TestInterestCounts:
    def test_ex3_values(self, ex3_record):
        assert vote_of(ex3_record) == 26
        assert user_type(ex3_record) == 0
        assert expert_interest(ex3_record.comments) == 1
        assert diversity(ex3_record.comments) == 1.0
        assert concern(ex3_record.comments) == 0.0

    def test_no_experts(self):
        assert expert_interest(comments(("a", 1, "normal"))) == 0

    def test_serial_owner(self):
        record = IdeaRecord(id="s", title="t keyboard", owner_is_serial=True)
        assert user_type(record) == 1


class TestFeatureVector:
    def test_fixture_row_one(self):
        m = Measurements(rel=27.02, vote=262, type=0, div=4.82, con=7.67, epr=1)
        assert feature_vector(m) == (1.0, 27.02, 262.0, 0.0, 1.0, 4.82, 7.67)

    def test_all_zero(self):
        m = Measurements(rel=0, vote=0, type=0, div=0, con=0, epr=0)
        assert feature_vector(m) == (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def test_ex3_slots(self, ex3_record):
        m = Measurements(
            rel=0.0, vote=vote_of(ex3_record), type=user_type(ex3_record),
            div=diversity(ex3_record.comments), con=concern(ex3_record.comments),
            epr=expert_interest(ex3_record.comments),
        )
        x = feature_vector(m)
        assert x[2] == 26.0 and x[3] == 0.0 and x[4] == 1.0
        assert x[5] == 1.0 and x[6] == 0.0

    def test_fixture_reproduced_bit_for_bit(self, fixture_path):
        from ideascreen.corpus import load_fixture

        for row in load_fixture(fixture_path):
            m = Measurements(rel=row.rel, vote=row.vote, type=row.type,
                             div=row.div, con=row.con, epr=row.epr)
            assert feature_vector(m) == (
                1.0, row.rel, float(row.vote), float(row.type),
                float(row.epr), row.div, row.con,
            )

    def test_leading_component_always_one(self):
        m = Measurements(rel=5.5, vote=-11, type=1, div=-1.0, con=-1.0, epr=2)
        assert feature_vector(m)[0] == 1.0


class TestScopeSettings:
    def test_setting1_constants(self):
        rng = np.random.default_rng(0)
        assert sample_scope_weight(1, "Product", rng) == 1
        assert sample_scope_weight(1, "ProductLine", rng) == 2
        assert sample_scope_weight(1, "GeneralCase", rng) == 3
        assert sample_scope_weight(1, "Unknown", rng) == 4

    @pytest.mark.parametrize("setting,level,lo,hi", [
        (2, "Product", 1, 10), (2, "ProductLine", 11, 20),
        (2, "GeneralCase", 21, 30), (2, "Unknown", 31, 40),
        (3, "Product", 1, 25), (3, "ProductLine", 26, 50),
        (3, "GeneralCase", 51, 75), (3, "Unknown", 76, 100),
    ])
    def test_ranges_inclusive(self, setting, level, lo, hi):
        rng = np.random.default_rng(7)
        draws = {sample_scope_weight(setting, level, rng) for _ in range(2000)}
        assert min(draws) == lo and max(draws) == hi
        assert draws <= set(range(lo, hi + 1))

    def test_setting2_product_uniform(self):
        rng = np.random.default_rng(123)
        counts = Counter(sample_scope_weight(2, "Product", rng) for _ in range(10_000))
        for value in range(1, 11):
            assert abs(counts[value] / 10_000 - 0.1) <= 0.02

    def test_weights_object_fixes_draws(self, dicts):
        w = ScopeWeights(dicts, setting=2, rng=np.random.default_rng(5))
        assert w.weight("keyboard") == w.weight("keyboard")
        assert 21 <= w.weight("keyboard") <= 30     # general-case bucket
        assert 1 <= w.weight("m1330") <= 10         # product bucket
        assert 31 <= w.weight("zorkmid") <= 40      # unknown bucket

    def test_random_settings_need_rng(self, dicts):
        with pytest.raises(ValueError):
            ScopeWeights(dicts, setting=2)
