import json
import random
import time

import pytest

from screenwright import prompts
from screenwright.dataset import Dataset
from screenwright.errors import ConfigError, StageFailure, StageOrderError
from screenwright.evaluation import Dimension, failure_rates
from screenwright.gateway import FailureLog, Stage
from screenwright.mock import DemoModel, FlakyBackend
from screenwright.model import Genre, Storyline
from screenwright.pipeline import (
    DEMO_STORYLINE,
    Mode,
    PipelineConfig,
    Runtime,
    StoryRun,
    default_demo_config,
    echo_config,
    run_dataset,
    run_eval,
    run_pipeline,
)
from screenwright.checkpoints import StoryStore

DEMO = Storyline(Genre.Drama, DEMO_STORYLINE)
MOCK = PipelineConfig(backend="mock")


class Counting:
    def __init__(self, inner):
        self.inner = inner
        self.requests = []

    @property
    def calls(self):
        return len(self.requests)

    def complete(self, req):
        self.requests.append(req)
        return self.inner.complete(req)


def _runtime(config=MOCK, backend=None):
    return Runtime.create(config, Counting(backend or DemoModel(config.seed)))


def test_replay_is_byte_identical_and_fast(tmp_path):
    config = default_demo_config()
    start = time.perf_counter()
    outs = []
    for i in range(3):
        run_pipeline(DEMO, config, tmp_path / f"r{i}")
        outs.append((tmp_path / f"r{i}" / "screenplay.txt").read_bytes())
    assert time.perf_counter() - start < 10
    assert outs[0] == outs[1] == outs[2]
    assert len(outs[0].split()) > 100


@pytest.mark.parametrize("changes", [{}, {"role_play": False}, {"mode": Mode.PLAN_THEN_WRITE}],
                         ids=["hollmwood", "no-role-play", "plan-then-write"])
def test_replay_matches_live_mock(tmp_path, changes):
    run_pipeline(DEMO, default_demo_config(**changes), tmp_path / "replay")
    run_pipeline(DEMO, MOCK.replace(**changes), tmp_path / "mock")
    assert (tmp_path / "replay" / "screenplay.txt").read_text() == (tmp_path / "mock" / "screenplay.txt").read_text()


def test_completed_run_is_idempotent(tmp_path):
    rt = _runtime()
    sp = run_pipeline(DEMO, MOCK, tmp_path, runtime=rt)
    first = (tmp_path / "screenplay.txt").read_text()
    assert rt.backend.calls > 0
    rt2 = _runtime()
    again = run_pipeline(DEMO, MOCK, tmp_path, runtime=rt2)
    assert rt2.backend.calls == 0
    assert again == sp
    assert (tmp_path / "screenplay.txt").read_text() == first


def test_force_regenerates(tmp_path):
    run_pipeline(DEMO, MOCK, tmp_path)
    rt = _runtime()
    run_pipeline(DEMO, MOCK, tmp_path, runtime=rt, force=True)
    assert rt.backend.calls > 0


class FailNth:
    """Fails the n-th distinct request sent with ``system``."""

    def __init__(self, system, n):
        self.system, self.n, self.seen = system, n, []

    def __call__(self, req):
        if req.system != self.system:
            return False
        if req.digest() not in self.seen:
            self.seen.append(req.digest())
        return self.seen.index(req.digest()) == self.n - 1


def test_resume_after_failure_skips_finished_work(tmp_path):
    clean = tmp_path / "clean"
    run_pipeline(DEMO, MOCK, clean)

    broken = tmp_path / "broken"
    flaky = FlakyBackend(DemoModel(0), FailNth(prompts.EXPAND_SYSTEM, 2))
    with pytest.raises(StageFailure) as info:
        run_pipeline(DEMO, MOCK, broken, runtime=Runtime.create(MOCK, flaky))
    assert info.value.stage == "Stage2_Expansion"
    assert flaky.injected == 3
    state = json.loads((broken / "state.json").read_text())
    assert state["completed"] == ["planning"]
    assert (broken / "chapter_plot_1a.tags").exists()
    assert not (broken / "chapter_plot_1b.tags").exists()
    failures = [json.loads(l) for l in (broken / "failures.jsonl").read_text().splitlines()]
    assert [f["error_kind"] for f in failures if "error_kind" in f] == ["MissingTag"] * 3

    rt = _runtime()
    run_pipeline(DEMO, MOCK, broken, runtime=rt, resume=True)
    systems = [r.system for r in rt.backend.requests]
    assert prompts.CHAR_GEN_SYSTEM not in systems
    assert systems.count(prompts.EXPAND_SYSTEM) == 3  # four chapters, the first was kept
    assert (broken / "screenplay.txt").read_text() == (clean / "screenplay.txt").read_text()


def test_without_resume_partial_checkpoints_are_discarded(tmp_path):
    run_pipeline(DEMO, MOCK, tmp_path)
    state = json.loads((tmp_path / "state.json").read_text())
    state["completed"] = ["planning"]
    (tmp_path / "state.json").write_text(json.dumps(state))
    rt = _runtime()
    run_pipeline(DEMO, MOCK, tmp_path, runtime=rt)
    n_without = rt.backend.calls

    state["completed"] = ["planning"]
    (tmp_path / "state.json").write_text(json.dumps(state))
    rt = _runtime()
    run_pipeline(DEMO, MOCK, tmp_path, runtime=rt, resume=True)
    assert rt.backend.calls < n_without


def test_stage_order_is_enforced(tmp_path):
    story = StoryRun(tmp_path, _runtime())
    story.init(DEMO)
    with pytest.raises(StageOrderError):
        story.expand()
    with pytest.raises(StageOrderError):
        story.draft()
    with pytest.raises(StageOrderError):
        story.act()
    story.plan()
    story.expand()
    with pytest.raises(StageOrderError):
        story.act()  # no drafts yet
    story.draft()
    assert len(story.act().episodes) == 4


def test_plan_then_write_skips_feedback_and_chapters(tmp_path):
    config = MOCK.replace(mode=Mode.PLAN_THEN_WRITE)
    run_pipeline(DEMO, config, tmp_path)
    assert not list(tmp_path.glob("chapter_*.tags"))
    assert not list(tmp_path.glob("draft_*.tags"))
    assert "rounds_completed=0" in (tmp_path / "planning.log").read_text()
    assert (tmp_path / "screenplay.txt").exists()


def test_config_echo_never_overwrites(tmp_path):
    store = StoryStore(tmp_path)
    assert echo_config(store, MOCK) == "config.json"
    assert echo_config(store, MOCK) == "config.json"
    assert echo_config(store, MOCK.replace(seed=5)) == "config_1.json"
    assert json.loads((tmp_path / "config.json").read_text())["seed"] == 0
    assert PipelineConfig.load(tmp_path / "config_1.json") == MOCK.replace(seed=5)


def test_config_round_trip_and_validation(tmp_path):
    assert PipelineConfig.from_dict(MOCK.to_dict()) == MOCK
    assert MOCK.params("judge").model_id == "gpt-4-32k-0613"
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict({"colour": "blue"})
    with pytest.raises(ConfigError):
        PipelineConfig(backend="replay")
    with pytest.raises(ConfigError):
        PipelineConfig(backend="nope")
    with pytest.raises(ConfigError):
        PipelineConfig.from_dict({"planning": {"max_feedback_rounds": -2}})
    (tmp_path / "bad.json").write_text("[1, 2]")
    with pytest.raises(ConfigError):
        PipelineConfig.load(tmp_path / "bad.json")


def test_live_backend_needs_credentials(monkeypatch):
    monkeypatch.delenv("LLM_API_KEY", raising=False)
    with pytest.raises(ConfigError):
        Runtime.create(PipelineConfig(backend="live"))


def test_different_storyline_in_same_dir(tmp_path):
    run_pipeline(DEMO, MOCK, tmp_path)
    other = Storyline(Genre.Drama, "Something else entirely. " * 10)
    with pytest.raises(ConfigError):
        run_pipeline(other, MOCK, tmp_path)


def _synthetic_dataset(n):
    return Dataset([(f"story_{i:02d}", Storyline(Genre.Drama, f"Marker{i:02d} " + DEMO_STORYLINE))
                    for i in range(n)])


def test_failure_schedule_over_sixty_runs(tmp_path):
    data = _synthetic_dataset(60)
    doomed = set(random.Random(2024).sample(range(60), 27))
    markers = {f"Marker{i:02d} " for i in doomed}

    def planning_fails(req):
        return req.system == prompts.CHAR_GEN_SYSTEM and any(m in req.last_user for m in markers)

    config = MOCK.replace(workers=4)
    flaky = FlakyBackend(DemoModel(0), planning_fails)
    report = run_dataset(data, config, tmp_path, runtime=Runtime.create(config, flaky))
    assert len(report.failed) == 27 and len(report.succeeded) == 33
    assert set(report.failed.values()) == {"Stage1_Planning"}
    assert flaky.injected == 27 * 3  # first try plus two retries each
    log = FailureLog.load(tmp_path / "failures.jsonl")
    assert failure_rates(log, {Stage.PLANNING: 60}) == {"Stage1_Planning": 45.0}
    batch = json.loads((tmp_path / "batch.json").read_text())
    assert sorted(batch["failed"]) == sorted(f"story_{i:02d}" for i in doomed)


def test_eval_between_methods(tmp_path):
    data = _synthetic_dataset(2)
    run_dataset(data, MOCK, tmp_path / "ours")
    run_dataset(data, MOCK.replace(mode=Mode.PLAN_THEN_WRITE), tmp_path / "ptw")
    rows, results = run_eval(tmp_path / "ptw", tmp_path / "ours", MOCK, tmp_path / "eval")
    assert len(results) == 2 * 2 * 4  # stories x top plots x dimensions
    assert [r.dimension for r in rows] == [d.value for d in Dimension]
    assert all(r.n_pairs == 4 for r in rows)
    assert (tmp_path / "eval" / "summary.txt").exists()
