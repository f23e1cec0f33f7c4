import re
import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from screenwright.dataset import (
    Dataset,
    SynthConfig,
    dataset_stats,
    format_stats,
    load_dataset,
    synthesize_dataset,
    synthesize_storyline,
)
from screenwright.errors import ConfigError, EmptyResults
from screenwright.gateway import Agent, Gateway, GenParams
from screenwright.mock import DemoModel, FlakyBackend
from screenwright.model import Genre, Storyline

from conftest import scripted_agent


def oracle(pairs):
    """Independent recomputation: regex tokens, statistics module."""
    groups = {}
    for genre, text in pairs:
        groups.setdefault(genre.value, []).append(len(re.findall(r"\S+", text)))
    allc = [c for cs in groups.values() for c in cs]
    groups["Total"] = allc
    return {g: (len(c), statistics.fmean(c), min(c), max(c)) for g, c in groups.items()}


FIXTURE = [
    (Genre.Romance, "two hearts meet " * 40),
    (Genre.Romance, "a letter\tarrives\nlate " * 31),
    (Genre.ScienceFiction, "the probe wakes " * 50),
    (Genre.Horror, "  something knocks  " * 60),
    (Genre.Horror, "the cellar door " * 35),
    (Genre.Horror, "nobody answers " * 52),
    (Genre.Comedy, "wrong wedding " * 66),
]


def test_stats_match_oracle_on_fixture():
    got = dataset_stats(Storyline(g, t) for g, t in FIXTURE)
    want = oracle(FIXTURE)
    assert set(got) == set(want)
    for g, (size, avg, lo, hi) in want.items():
        s = got[g]
        assert (s.size, s.min, s.max) == (size, lo, hi)
        assert s.avg == avg


@given(st.lists(st.tuples(st.sampled_from(list(Genre)), st.text(alphabet=" \n\tab", max_size=40)
                          .filter(str.strip)), min_size=1, max_size=30))
def test_stats_match_oracle_property(pairs):
    got = dataset_stats(Storyline(g, t) for g, t in pairs)
    for g, (size, avg, lo, hi) in oracle(pairs).items():
        assert (got[g].size, got[g].min, got[g].max) == (size, lo, hi)
        assert got[g].avg == pytest.approx(avg, rel=1e-12)


def test_empty_dataset():
    with pytest.raises(EmptyResults):
        dataset_stats([])


def test_six_by_ten_synthesis(tmp_path):
    agent = Agent(Gateway(DemoModel(4)), GenParams())
    ds = synthesize_dataset(agent, SynthConfig(), tmp_path)
    assert len(ds) == 60
    assert {g: len(v) for g, v in ds.by_genre().items()} == {g: 10 for g in Genre}
    assert len(list(tmp_path.glob("*.txt"))) == 60
    back = load_dataset(tmp_path)
    assert back.items == ds.items
    stats = dataset_stats(back)
    assert stats["Total"].size == 60
    assert "Science Fiction" in format_stats(stats)


def test_out_of_bound_storyline_regenerated_once():
    short = "<storyline>too short</storyline>"
    ok = "<storyline>" + "word " * 100 + "</storyline>"
    agent, backend = scripted_agent([short, ok])
    assert synthesize_storyline(agent, Genre.Drama).words == 100
    assert len(backend.requests) == 2

    agent, backend = scripted_agent([short, short])
    assert synthesize_storyline(agent, Genre.Drama).words == 2
    assert len(backend.requests) == 2


def test_failed_items_are_skipped_and_logged():
    flaky = FlakyBackend(DemoModel(1), lambda req: "Horror" in req.last_user)
    agent = Agent(Gateway(flaky), GenParams(), max_retries=1)
    ds = synthesize_dataset(agent, SynthConfig(per_genre=2))
    assert len(ds) == 10
    assert Genre.Horror not in ds.by_genre()
    assert [sid for _, sid in agent.gateway.failure_log.stage_failures] == ["horror_1", "horror_2"]


def test_synth_config_validation():
    with pytest.raises(ConfigError):
        SynthConfig(per_genre=0)
    with pytest.raises(ConfigError):
        SynthConfig(genres=())
    with pytest.raises(ConfigError):
        synthesize_storyline(scripted_agent([])[0], Genre.Crime, SynthConfig(genres=(Genre.Drama,)))


def test_dataset_len():
    assert len(Dataset()) == 0
