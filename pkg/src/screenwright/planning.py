"""Stage 1: characters and outline, each polished by an Editor/Writer loop."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from . import codec, prompts, tags
from .checkpoints import StoryStore
from .errors import ConfigError, StageFailure, StructuredOutputFailure
from .gateway import Agent, Stage, Turn
from .model import MAX_CHARACTERS, MIN_CHARACTERS, Advice, CharacterSet, Outline, Storyline

logger = logging.getLogger(__name__)

PLANNING_LOG = "planning.log"


class Target(enum.Enum):
    CHARACTERS = "characters"
    OUTLINE = "outline"


@dataclass(frozen=True)
class PlanningConfig:
    min_characters: int = MIN_CHARACTERS
    max_characters: int = MAX_CHARACTERS
    max_feedback_rounds: int = 2
    strict_names: bool = True

    def __post_init__(self):
        if self.max_feedback_rounds < 0:
            raise ConfigError("max_feedback_rounds must be >= 0")
        if not MIN_CHARACTERS <= self.min_characters <= self.max_characters <= MAX_CHARACTERS:
            raise ConfigError(
                f"character bounds must satisfy {MIN_CHARACTERS} <= min <= max <= {MAX_CHARACTERS}"
            )


@dataclass
class RevisionSession:
    """Writer and Editor transcripts for one artifact.

    Both histories only grow. The Editor sees its own earlier advice because
    follow-up prompts are appended after its history.
    """

    target: Target
    storyline: Storyline
    writer: Agent
    editor: Agent
    config: PlanningConfig = field(default_factory=PlanningConfig)
    characters: CharacterSet | None = None  # fixed input when target is OUTLINE
    writer_history: list[Turn] = field(default_factory=list)
    editor_history: list[Turn] = field(default_factory=list)
    rounds_completed: int = 0
    artifact: CharacterSet | Outline | None = None
    advice_log: list[Advice] = field(default_factory=list)

    @property
    def writer_system(self) -> str:
        return prompts.CHAR_GEN_SYSTEM if self.target is Target.CHARACTERS else prompts.OUT_GEN_SYSTEM

    @property
    def editor_system(self) -> str:
        return prompts.ADVICE_CHAR_SYSTEM if self.target is Target.CHARACTERS else prompts.ADVICE_OUT_SYSTEM

    def schema(self) -> tags.TagSchema:
        return tags.CHARACTERS if self.target is Target.CHARACTERS else tags.OUTLINE

    def validate(self, doc: tags.TagDocument):
        if self.target is Target.CHARACTERS:
            return codec.extract_characters(doc, self.config.min_characters, self.config.max_characters)
        return codec.extract_outline(doc, self.characters, strict=self.config.strict_names)

    def _writer_call(self, user: str):
        turns = [*self.writer_history, Turn("user", user)]
        req = self.writer.request(self.writer_system, turns)
        value, raw = self.writer.structured(req, self.schema(), Stage.PLANNING, self.validate, return_raw=True)
        self.writer_history.extend([Turn("user", user), Turn("assistant", raw)])
        self.artifact = value
        return value


def _characters_full(cs: CharacterSet) -> str:
    return codec.render_characters(cs).rstrip("\n")


def generate_characters(session: RevisionSession) -> CharacterSet:
    user = prompts.fill(prompts.CHAR_GEN_USER, storyline=session.storyline.text)
    return session._writer_call(user)


def generate_outline(session: RevisionSession) -> Outline:
    user = prompts.fill(prompts.OUT_GEN_USER, storyline=session.storyline.text,
                        characters=_characters_full(session.characters))
    return session._writer_call(user)


def editor_prompt(session: RevisionSession) -> str:
    """The Editor's next user prompt: the initial request, or the follow-up once history exists."""
    story = session.storyline.text
    first = not session.editor_history
    if session.target is Target.CHARACTERS:
        inner = codec.render_characters_inner(session.artifact)
        if first:
            return prompts.fill(prompts.ADVICE_CHAR_USER, storyline=story, characters=inner)
        return prompts.fill(prompts.ADVICE_AGAIN_CHAR_USER, storyline=story, characters=inner)
    outline = codec.render_outline_inner(session.artifact)
    if first:
        return prompts.fill(prompts.ADVICE_OUT_USER, storyline=story,
                            characters=codec.render_characters_inner(session.characters), outline=outline)
    return prompts.fill(prompts.ADVICE_AGAIN_OUT_USER, storyline=story,
                        characters=_characters_full(session.characters), outline=outline)


def editor_feedback(session: RevisionSession) -> Advice:
    user = editor_prompt(session)
    turns = [*session.editor_history, Turn("user", user)]
    req = session.editor.request(session.editor_system, turns)
    advice, raw = session.editor.structured(req, tags.ADVICE, Stage.PLANNING,
                                            codec.extract_advice, return_raw=True)
    session.editor_history.extend([Turn("user", user), Turn("assistant", raw)])
    session.advice_log.append(advice)
    return advice


def revise(session: RevisionSession, advice: Advice):
    if advice.is_none:
        raise ValueError("revise() needs real advice, not the stop sentinel")
    story = session.storyline.text
    if session.target is Target.CHARACTERS:
        user = prompts.fill(prompts.REVISE_CHAR_USER, advice=advice.content, storyline=story)
    else:
        user = prompts.fill(prompts.REVISE_OUT_USER, advice=advice.content, storyline=story,
                            characters=_characters_full(session.characters))
    value = session._writer_call(user)
    session.rounds_completed += 1
    return value


def _render(artifact) -> str:
    if isinstance(artifact, CharacterSet):
        return codec.render_characters(artifact)
    return codec.render_outline(artifact)


def polish(session: RevisionSession, store: StoryStore | None = None):
    """Generate, then alternate feedback and revision until the Editor says None
    or the round limit is reached."""
    name = session.target.value
    if session.target is Target.CHARACTERS:
        generate_characters(session)
    else:
        generate_outline(session)
    if store is not None:
        store.write(f"{name}_r0.tags", _render(session.artifact))
    while session.rounds_completed < session.config.max_feedback_rounds:
        advice = editor_feedback(session)
        round_no = session.rounds_completed + 1
        if store is not None:
            store.log(PLANNING_LOG, f"{name} round {round_no} advice: {advice.body!r}")
        if advice.is_none:
            break
        revise(session, advice)
        if store is not None:
            store.write(f"{name}_r{session.rounds_completed}.tags", _render(session.artifact))
    if store is not None:
        store.write(f"{name}.tags", _render(session.artifact))
        store.log(PLANNING_LOG, f"{name} rounds_completed={session.rounds_completed}")
    return session.artifact


@dataclass
class PlanningResult:
    characters: CharacterSet
    outline: Outline
    character_session: RevisionSession
    outline_session: RevisionSession


def run_plot_planning(storyline: Storyline, writer: Agent, editor: Agent,
                      config: PlanningConfig | None = None, store: StoryStore | None = None,
                      story_id: str = "") -> PlanningResult:
    config = config or PlanningConfig()
    try:
        chars = RevisionSession(Target.CHARACTERS, storyline, writer, editor, config)
        characters = polish(chars, store)
        out = RevisionSession(Target.OUTLINE, storyline, writer, editor, config, characters=characters)
        outline = polish(out, store)
    except StructuredOutputFailure as exc:
        writer.gateway.failure_log.stage_failed(Stage.PLANNING, story_id)
        raise StageFailure(Stage.PLANNING.value, story_id, exc) from exc
    return PlanningResult(characters, outline, chars, out)
