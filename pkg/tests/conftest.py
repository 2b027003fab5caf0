import datetime as dt

import pytest

from ideascreen.corpus import CommentRecord, IdeaRecord, Status, to_idea_text
from ideascreen.lingua import Dictionaries, default_dict_dir


def pytest_terminal_summary(terminalreporter):
    """Surface the acceptance pass/fail lines in the run summary."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def dicts() -> Dictionaries:
    return Dictionaries.load()


@pytest.fixture(scope="session")
def fixture_path():
    return default_dict_dir() / "table7.fixture"


@pytest.fixture(scope="session")
def trends_path():
    return default_dict_dir() / "trends.csv"


# The anti-microbial keyboard idea: 7 sentences, the word counts the
# extraction and frequency tests rely on (4x anti-microbial, 3x keyboard).
EX1_TITLE = "Sell the first anti-microbial keyboard"
EX1_BODY = (
    "Dell could be the first to sell an anti-microbial keyboard to hospitals. "
    "An anti-microbial coating stops germs from living on the keys. "
    "Doctors and nurses share the same keyboard every day. "
    "Germs spread in hospitals through shared surfaces. "
    "An anti-microbial surface would reduce infections. "
    "This will get Dell in the medical journals as being cutting edge in health well being."
)

# One-word title forces the whole-idea path.  The processed stream is
# [suggest, sell, color, desktop, want, notebook, desktop, model, color,
#  gray, notebook, work]: "color desktop" and "notebook desktop" are the
# only adjacent keyword pairs, and "color"/"notebook" never touch.
EX2_TITLE = "Suggestion"
EX2_BODY = (
    "Please sell a color on desktop. "
    "I want a notebook desktop model in my color, and my gray notebook works."
)


@pytest.fixture()
def ex1_record() -> IdeaRecord:
    return IdeaRecord(
        id="ex1", title=EX1_TITLE, body=EX1_BODY,
        posted_date=dt.date(2007, 6, 5), owner_id="u-ex1",
        status=Status.IMPLEMENTED, votes=14,
    )


@pytest.fixture()
def ex1_idea(ex1_record, dicts):
    return to_idea_text(ex1_record, dicts)


@pytest.fixture()
def ex2_record() -> IdeaRecord:
    return IdeaRecord(
        id="ex2", title=EX2_TITLE, body=EX2_BODY,
        posted_date=dt.date(2008, 2, 1), owner_id="u-ex2",
        status=Status.ARCHIVED, votes=3,
    )


@pytest.fixture()
def ex2_idea(ex2_record, dicts):
    return to_idea_text(ex2_record, dicts)


@pytest.fixture()
def ex3_record() -> IdeaRecord:
    return IdeaRecord(
        id="ex3",
        title='Multiple Hard drive support for 17" Precision laptop line',
        body="Give the big Precision laptops two internal hard drives.",
        posted_date=dt.date(2008, 4, 10),
        owner_id="surfpuuppy2k",
        owner_is_serial=False,
        status=Status.IMPLEMENTED,
        votes=26,
        comments=(
            CommentRecord(author_id="jackie_d", date=dt.date(2008, 9, 5),
                          text="Changed status to IMPLEMENTED.", author_role="expert"),
            CommentRecord(author_id="mano_g", date=dt.date(2008, 9, 5),
                          text="The M6400 has support for 2 internal hard drives.",
                          author_role="normal"),
        ),
    )
