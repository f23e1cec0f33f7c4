"""End-to-end orchestration: configuration, per-story state, resume, evaluation runs."""

from __future__ import annotations

import dataclasses
import enum
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import codec, tags
from .checkpoints import StoryStore
from .dataset import Dataset
from .errors import ConfigError, CoverageGap, StageFailure, StageOrderError
from .evaluation import (
    PairResult,
    WinRateRow,
    aggregate_all,
    form_pairs,
    judge_all,
    segment_by_top_plot,
    shared_context,
    write_reports,
)
from .expansion import ExpansionConfig, chapter_file, expand_all, load_chapter
from .gateway import (
    Agent,
    Cassette,
    FailureLog,
    GenParams,
    Gateway,
    HTTPBackend,
    RateLimiter,
    RecordingBackend,
    ReplayBackend,
)
from .mock import DemoModel
from .model import CharacterSet, Genre, Outline, Screenplay, Storyline, word_count
from .planning import PlanningConfig, run_plot_planning
from .screenplay import (
    SCREENPLAY_FILE,
    assemble_screenplay,
    draft_file,
    episode_file,
    generate_plan_then_write,
    load_draft,
    realize_episodes,
    write_drafts,
    write_screenplay,
)

logger = logging.getLogger(__name__)

ROLES = ("writer", "editor", "actor", "judge")
BACKENDS = ("live", "record", "replay", "mock")
STAGES = ("planning", "expansion", "screenplay")

STATE_FILE = "state.json"
CONFIG_FILE = "config.json"
STORYLINE_FILE = "storyline.txt"
CHARACTERS_FILE = "characters.tags"
OUTLINE_FILE = "outline.tags"
FAILURES_FILE = "failures.jsonl"


def demo_path(name: str) -> Path:
    return Path(str(resources.files("screenwright") / "data" / name))


class Mode(enum.Enum):
    HOLLMWOOD = "hollmwood"
    PLAN_THEN_WRITE = "plan-then-write"


def _default_roles() -> dict[str, GenParams]:
    roles = {r: GenParams() for r in ROLES}
    roles["judge"] = GenParams(model_id="gpt-4-32k-0613")
    return roles


@dataclass(frozen=True)
class PipelineConfig:
    roles: Mapping[str, GenParams] = field(default_factory=_default_roles)
    planning: PlanningConfig = field(default_factory=PlanningConfig)
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    mode: Mode = Mode.HOLLMWOOD
    role_play: bool = True
    max_retries: int = 2
    rate_limit: int | None = None  # requests per minute
    seed: int = 0
    backend: str = "mock"
    cassette: str | None = None
    workers: int = 1
    mock_judge: str = "hash"

    def __post_init__(self):
        roles = dict(_default_roles())
        roles.update(self.roles)
        unknown = set(roles) - set(ROLES)
        if unknown:
            raise ConfigError(f"unknown roles: {sorted(unknown)}")
        object.__setattr__(self, "roles", roles)
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.backend in ("record", "replay") and not self.cassette:
            raise ConfigError(f"backend {self.backend!r} needs a cassette path")
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.rate_limit is not None and self.rate_limit < 1:
            raise ConfigError("rate_limit must be >= 1 request per minute")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def params(self, role: str) -> GenParams:
        return self.roles[role]

    def to_dict(self) -> dict[str, Any]:
        return {
            "roles": {r: dataclasses.asdict(p) for r, p in self.roles.items()},
            "planning": dataclasses.asdict(self.planning),
            "expansion": dataclasses.asdict(self.expansion),
            "mode": self.mode.value,
            "role_play": self.role_play,
            "max_retries": self.max_retries,
            "rate_limit": self.rate_limit,
            "seed": self.seed,
            "backend": self.backend,
            "cassette": self.cassette,
            "workers": self.workers,
            "mock_judge": self.mock_judge,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> PipelineConfig:
        allowed = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - allowed
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        kw = dict(data)
        try:
            if "roles" in kw:
                kw["roles"] = {r: GenParams(**p) for r, p in kw["roles"].items()}
            if "planning" in kw:
                kw["planning"] = PlanningConfig(**kw["planning"])
            if "expansion" in kw:
                kw["expansion"] = ExpansionConfig(**kw["expansion"])
            if "mode" in kw:
                kw["mode"] = Mode(kw["mode"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(**kw)

    @classmethod
    def load(cls, path: Path | str) -> PipelineConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def replace(self, **changes) -> PipelineConfig:
        return dataclasses.replace(self, **changes)


# -- backends and agents -----------------------------------------------------------

def make_backend(config: PipelineConfig, *, judge: bool = False):
    if config.backend == "mock":
        return DemoModel(config.seed, judge=config.mock_judge if judge else "hash")
    if config.backend == "replay":
        path = Path(config.cassette)
        if not path.exists():
            raise ConfigError(f"cassette {path} does not exist")
        return ReplayBackend(Cassette(path))
    if not os.environ.get("LLM_API_KEY"):
        raise ConfigError("LLM_API_KEY must be set for the live and record backends")
    http = HTTPBackend()
    if config.backend == "record":
        return RecordingBackend(http, Cassette(config.cassette))
    return http


@dataclass
class Runtime:
    """Objects shared by every story of one invocation."""

    config: PipelineConfig
    backend: Any
    failure_log: FailureLog = field(default_factory=FailureLog)
    rate_limiter: RateLimiter | None = None

    @classmethod
    def create(cls, config: PipelineConfig, backend=None, *, judge: bool = False) -> Runtime:
        limiter = RateLimiter(config.rate_limit) if config.rate_limit else None
        return cls(config, backend if backend is not None else make_backend(config, judge=judge),
                   rate_limiter=limiter)

    def gateway(self, story_id: str = "") -> Gateway:
        return Gateway(self.backend, rate_limiter=self.rate_limiter, failure_log=self.failure_log,
                       story_id=story_id)

    def agents(self, gateway: Gateway) -> dict[str, Agent]:
        return {r: Agent(gateway, self.config.params(r), self.config.max_retries) for r in ROLES}


# -- per-story state ---------------------------------------------------------------------

@dataclass
class StageState:
    story_id: str
    genre: str = Genre.Drama.value
    completed: list[str] = field(default_factory=list)
    artifacts: dict[str, list[str]] = field(default_factory=dict)

    def done(self, stage: str) -> bool:
        return stage in self.completed

    def require(self, stage: str) -> None:
        i = STAGES.index(stage)
        missing = [s for s in STAGES[:i] if not self.done(s)]
        if missing:
            raise StageOrderError(f"{stage} needs {', '.join(missing)} to be complete first")

    def complete(self, stage: str, artifacts: Sequence[str]) -> None:
        self.require(stage)
        if stage not in self.completed:
            self.completed.append(stage)
        self.artifacts[stage] = list(artifacts)

    def reset_from(self, stage: str) -> None:
        i = STAGES.index(stage)
        self.completed = [s for s in self.completed if STAGES.index(s) < i]
        for s in STAGES[i:]:
            self.artifacts.pop(s, None)

    @classmethod
    def load(cls, store: StoryStore, story_id: str) -> StageState:
        if not store.exists(STATE_FILE):
            return cls(story_id)
        return cls(**json.loads(store.read(STATE_FILE)))

    def save(self, store: StoryStore) -> None:
        store.write(STATE_FILE, json.dumps(dataclasses.asdict(self), indent=2) + "\n")


def echo_config(store: StoryStore, config: PipelineConfig) -> str:
    """Write the effective config next to the artifacts; earlier echoes are never overwritten."""
    text = json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
    name, k = CONFIG_FILE, 1
    while store.exists(name):
        if store.read(name) == text:
            return name
        name, k = f"config_{k}.json", k + 1
    store.write(name, text)
    return name


def load_storyline(store: StoryStore, state: StageState) -> Storyline:
    return Storyline(Genre.parse(state.genre), store.read(STORYLINE_FILE).strip())


def load_characters(store: StoryStore, config: PipelineConfig) -> CharacterSet:
    doc = tags.parse_tag_document(store.read(CHARACTERS_FILE), tags.CHARACTERS)
    return codec.extract_characters(doc, config.planning.min_characters, config.planning.max_characters)


def load_outline(store: StoryStore, characters: CharacterSet | None = None) -> Outline:
    doc = tags.parse_tag_document(store.read(OUTLINE_FILE), tags.OUTLINE)
    return codec.extract_outline(doc, characters, strict=False)


# -- stages -------------------------------------------------------------------------------------

class StoryRun:
    """Runs the stages of one story inside its directory."""

    def __init__(self, story_dir: Path | str, runtime: Runtime, *, story_id: str | None = None,
                 resume: bool = False, force: bool = False):
        self.store = StoryStore(story_dir)
        self.story_id = story_id or self.store.root.name
        self.runtime = runtime
        self.config = runtime.config
        self.resume = resume
        self.force = force
        self.state = StageState.load(self.store, self.story_id)
        self.gateway = runtime.gateway(self.story_id)
        self.agents = runtime.agents(self.gateway)

    def init(self, storyline: Storyline) -> None:
        if self.store.exists(STORYLINE_FILE) and self.store.read(STORYLINE_FILE).strip() != storyline.text.strip():
            if not self.force:
                raise ConfigError(f"{self.store.root} already holds a different storyline; use --force")
            self.state = StageState(self.story_id)
        self.store.write(STORYLINE_FILE, storyline.text.strip() + "\n")
        self.state.genre = storyline.genre.value
        self.state.save(self.store)
        echo_config(self.store, self.config)

    def _should_skip(self, stage: str) -> bool:
        if self.state.done(stage) and not self.force:
            logger.info("%s: %s already complete", self.story_id, stage)
            return True
        return False

    def _discard(self, names: Sequence[str]) -> None:
        for n in names:
            self.store.remove(n)

    def _start(self, stage: str, partials: Sequence[str]) -> None:
        self.state.require(stage)
        if self.force or not self.resume:
            self._discard(partials)
        if self.force:
            self.state.reset_from(stage)

    def plan(self):
        if self._should_skip("planning"):
            return
        self._start("planning", [CHARACTERS_FILE, OUTLINE_FILE])
        planning = self.config.planning
        if self.config.mode is Mode.PLAN_THEN_WRITE:
            planning = dataclasses.replace(planning, max_feedback_rounds=0)
        storyline = load_storyline(self.store, self.state)
        run_plot_planning(storyline, self.agents["writer"], self.agents["editor"], planning,
                          self.store, self.story_id)
        self.state.complete("planning", [CHARACTERS_FILE, OUTLINE_FILE])
        self.state.save(self.store)

    def _outline(self):
        characters = load_characters(self.store, self.config)
        return characters, load_outline(self.store, characters)

    def expand(self):
        if self._should_skip("expansion"):
            return
        self.state.require("expansion")
        characters, outline = self._outline()
        files = [chapter_file(l) for l in outline.labels]
        self._start("expansion", files)
        if self.config.mode is Mode.PLAN_THEN_WRITE:
            self.state.complete("expansion", [])
        else:
            expand_all(self.agents["writer"], outline, characters, load_storyline(self.store, self.state),
                       self.config.expansion, self.store, self.story_id)
            self.state.complete("expansion", files)
        self.state.save(self.store)

    def _chapters(self, outline):
        return [load_chapter(self.store, l) for l in outline.labels]

    def draft(self):
        """First half of Stage 3; ``act`` completes it."""
        self.state.require("screenplay")
        characters, outline = self._outline()
        if self.config.mode is Mode.PLAN_THEN_WRITE:
            return []
        if self.force or not (self.resume or self.state.done("screenplay")):
            self._discard([draft_file(l) for l in outline.labels])
        return write_drafts(self.agents["writer"], outline, characters, self._chapters(outline),
                            self.store, self.story_id)

    def act(self) -> Screenplay:
        self.state.require("screenplay")
        characters, outline = self._outline()
        files = [episode_file(l) for l in outline.labels]
        if self.config.mode is Mode.PLAN_THEN_WRITE:
            self._start("screenplay", files)
            sp = generate_plan_then_write(self.agents["writer"], load_storyline(self.store, self.state),
                                          characters, outline, store=self.store, story_id=self.story_id)
        else:
            self.state.require("screenplay")
            missing = [l for l in outline.labels if not self.store.exists(draft_file(l))]
            if missing:
                raise StageOrderError(f"no script drafts for {', '.join(map(str, missing))}; run draft first")
            if self.force or not self.resume:
                self._discard(files)
            drafts = [load_draft(self.store, l) for l in outline.labels]
            episodes = realize_episodes(self.agents["writer"], self.agents["actor"], outline, characters, drafts,
                                        role_play=self.config.role_play, store=self.store,
                                        story_id=self.story_id)
            sp = assemble_screenplay(episodes, outline)
            write_screenplay(sp, self.store)
        self.state.complete("screenplay", files + [SCREENPLAY_FILE])
        self.state.save(self.store)
        return sp

    def screenplay(self) -> Screenplay:
        if self._should_skip("screenplay"):
            characters, outline = self._outline()
            return codec.parse_screenplay(self.store.read(SCREENPLAY_FILE), outline.labels, characters.names)
        if self.force:
            self.state.reset_from("screenplay")
        self.draft()
        return self.act()

    def run(self) -> Screenplay:
        self.plan()
        self.expand()
        return self.screenplay()

    def word_totals(self) -> dict[str, int]:
        prompt = sum(word_count(r.system) + sum(word_count(t.content) for t in r.turns)
                     for r, _ in self.gateway.transcript)
        completion = sum(word_count(resp) for _, resp in self.gateway.transcript)
        return {"calls": len(self.gateway.transcript), "prompt_words": prompt, "completion_words": completion}


def run_pipeline(storyline: Storyline, config: PipelineConfig, out_dir: Path | str, *,
                 story_id: str | None = None, runtime: Runtime | None = None,
                 resume: bool = False, force: bool = False) -> Screenplay:
    """Run every stage for one storyline under ``out_dir`` and return the screenplay."""
    runtime = runtime or Runtime.create(config)
    story = StoryRun(out_dir, runtime, story_id=story_id, resume=resume, force=force)
    story.init(storyline)
    try:
        sp = story.run()
    finally:
        runtime.failure_log.dump(story.store.path(FAILURES_FILE))
        story.store.log("run.log", json.dumps(story.word_totals()))
    return sp


@dataclass
class BatchReport:
    succeeded: list[str] = field(default_factory=list)
    failed: dict[str, str] = field(default_factory=dict)  # story id -> failing stage


def run_dataset(dataset: Dataset, config: PipelineConfig, out_dir: Path | str, *,
                runtime: Runtime | None = None, resume: bool = False, force: bool = False) -> BatchReport:
    """Run many storylines in a bounded pool; a stage failure halts only its own story."""
    runtime = runtime or Runtime.create(config)
    out = Path(out_dir)
    report = BatchReport()

    def one(item):
        sid, storyline = item
        try:
            run_pipeline(storyline, config, out / sid, story_id=sid, runtime=runtime, resume=resume, force=force)
            return sid, None
        except StageFailure as exc:
            logger.error("%s", exc)
            return sid, exc.stage

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(one, dataset.items))
    else:
        outcomes = [one(item) for item in dataset.items]
    for sid, stage in outcomes:
        if stage is None:
            report.succeeded.append(sid)
        else:
            report.failed[sid] = stage
    out.mkdir(parents=True, exist_ok=True)
    runtime.failure_log.dump(out / FAILURES_FILE)
    (out / "batch.json").write_text(json.dumps(dataclasses.asdict(report), indent=2) + "\n", encoding="utf-8")
    return report


# -- evaluation ------------------------------------------------------------------------------------

def _story_dirs(root: Path) -> dict[str, Path]:
    if (root / SCREENPLAY_FILE).exists():
        return {"story": root}  # a single story directory
    return {p.name: p for p in sorted(root.iterdir()) if (p / SCREENPLAY_FILE).exists()}


def _load_story(d: Path, config: PipelineConfig):
    store = StoryStore(d)
    state = StageState.load(store, d.name)
    characters = load_characters(store, config)
    outline = load_outline(store, characters)
    sp = codec.parse_screenplay(store.read(SCREENPLAY_FILE), outline.labels, characters.names)
    return load_storyline(store, state), characters, outline, sp


def run_eval(x_dir: Path | str, y_dir: Path | str, config: PipelineConfig, out_dir: Path | str | None = None,
             *, runtime: Runtime | None = None, x_name: str = "X", y_name: str = "Y"
             ) -> tuple[list[WinRateRow], list[PairResult]]:
    xs, ys = _story_dirs(Path(x_dir)), _story_dirs(Path(y_dir))
    common = sorted(set(xs) & set(ys))
    for sid in sorted(set(xs) ^ set(ys)):
        logger.warning("story %s has a screenplay for only one method; skipped", sid)
    if not common:
        raise CoverageGap("no story has screenplays for both methods")
    runtime = runtime or Runtime.create(config, judge=True)
    judge = runtime.agents(runtime.gateway("eval"))["judge"]
    jobs = []
    for sid in common:
        storyline, characters, outline, sp_x = _load_story(xs[sid], config)
        _, _, outline_y, sp_y = _load_story(ys[sid], config)
        ctx = shared_context(storyline, characters, outline)
        for pair in form_pairs(sid, segment_by_top_plot(sp_x, outline), segment_by_top_plot(sp_y, outline_y)):
            jobs.append((pair, ctx))
    results = judge_all(judge, jobs, config.seed, workers=config.workers)
    rows = aggregate_all(results)
    if out_dir is not None:
        write_reports(out_dir, results, rows, x_name, y_name)
        runtime.failure_log.dump(Path(out_dir) / FAILURES_FILE)
    return rows, results


def default_demo_config(**changes) -> PipelineConfig:
    base = PipelineConfig(backend="replay", cassette=str(demo_path("demo_cassette.jsonl")))
    return base.replace(**changes) if changes else base


DEMO_STORYLINE = (
    "A lighthouse keeper on a remote northern island finds a stranded teenage radio operator who "
    "claims the mainland has gone silent. As storms cut the island off, the two must decide whether "
    "to trust the keeper's estranged brother, who arrives by boat with supplies and a story that "
    "does not add up. Old family debts, a hidden cache of fuel and a broken transmitter force each "
    "of them to choose between safety and the truth about what happened on the coast."
)


def record_demo_cassette(path: Path | str, storyline: Storyline | None = None, seed: int = 0) -> Path:
    """Record the demo model answering every mode of the pipeline into one cassette.

    Duplicate (request, response) records are dropped so replay stays compact.
    """
    import tempfile

    path = Path(path)
    storyline = storyline or Storyline(Genre.Drama, DEMO_STORYLINE)
    path.unlink(missing_ok=True)
    cassette = Cassette(path)
    backend = RecordingBackend(DemoModel(seed), cassette)
    base = PipelineConfig(backend="mock", seed=seed)
    variants = [base, base.replace(role_play=False), base.replace(mode=Mode.PLAN_THEN_WRITE)]
    with tempfile.TemporaryDirectory() as tmp:
        for i, cfg in enumerate(variants):
            run_pipeline(storyline, cfg, Path(tmp) / f"v{i}", story_id="demo",
                         runtime=Runtime.create(cfg, backend))
    seen, lines = set(), []
    for line in path.read_text(encoding="utf-8").splitlines():
        rec = json.loads(line)
        key = (rec["hash"], rec["response"])
        if key not in seen:
            seen.add(key)
            rec["timestamp"] = 0
            lines.append(json.dumps(rec, ensure_ascii=False, sort_keys=True))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
