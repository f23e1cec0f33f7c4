import pytest

from screenwright.gateway import Agent, FailureLog, Gateway, GenParams, ScriptedBackend
from screenwright.mock import DemoModel
from screenwright.model import (
    Character,
    CharacterSet,
    Chapter,
    Genre,
    Outline,
    PlotLabel,
    Storyline,
    Subplot,
    TopPlot,
)

NAMES = ("Dorothy Smith", "Emma Taylor", "Walter Reyes", "June Park")


def make_cast(n=4):
    return CharacterSet(tuple(Character(NAMES[i] if i < 4 else f"Extra Person{i}", f"intro of person {i}")
                              for i in range(n)))


def make_outline(shape=(2, 2), names=NAMES):
    """``shape`` lists the subplot count of each top plot."""
    tops = []
    k = 0
    for t, n_sub in enumerate(shape, start=1):
        subs = []
        for s in range(n_sub):
            who = (names[k % len(names)], names[(k + 1) % len(names)])
            subs.append(Subplot(PlotLabel(t, chr(97 + s)), f"subplot text {t}{chr(97 + s)}.", f"place {k}", who))
            k += 1
        tops.append(TopPlot(PlotLabel(t), f"top plot text {t}.", "", tuple(names[:2]), tuple(subs)))
    return Outline(tuple(tops))


def make_chapters(outline):
    return [Chapter(l, f"chapter body for {l}") for l in outline.labels]


STORY = Storyline(Genre.Drama, " ".join(["word"] * 120))


def scripted_agent(replies, params=None, max_retries=2, story_id="s"):
    backend = ScriptedBackend(replies)
    gw = Gateway(backend, failure_log=FailureLog(), story_id=story_id)
    return Agent(gw, params or GenParams(), max_retries), backend


def demo_agent(seed=0, **kw):
    gw = Gateway(DemoModel(seed, **kw), failure_log=FailureLog(), story_id="demo")
    return Agent(gw, GenParams())


@pytest.fixture
def cast():
    return make_cast()


@pytest.fixture
def outline():
    return make_outline()


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_lines():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
