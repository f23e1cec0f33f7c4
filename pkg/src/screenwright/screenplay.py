"""Stage 3: chapters to script drafts, drafts to episodes, episodes to a screenplay."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import codec, prompts, tags
from .checkpoints import StoryStore
from .errors import (
    ConstraintViolation,
    DuplicateEpisode,
    FormatError,
    ForeignCharacter,
    MissingEpisode,
    MissingSceneHeading,
    RoleMismatch,
    StageFailure,
    StructuredOutputFailure,
)
from .gateway import Agent, FailureRecord, Stage
from .model import (
    Chapter,
    Character,
    CharacterSet,
    DetailedPerformance,
    DraftEvent,
    Episode,
    Outline,
    PlotLabel,
    SceneHeading,
    Screenplay,
    ScriptDraft,
    Storyline,
    Subplot,
)

logger = logging.getLogger(__name__)

SCREENPLAY_FILE = "screenplay.txt"
SCREENPLAY_LOG = "screenplay.log"


def _unwrap(exc: StructuredOutputFailure, *kinds: type[FormatError]):
    """Surface the domain error behind a structured failure when the caller lists it."""
    if isinstance(exc.last_error, kinds):
        raise exc.last_error from exc
    raise exc


# -- drafting --------------------------------------------------------------------

def draft_prompt(chapter: Chapter, scene: str, involved: Sequence[Character]) -> tuple[str, str]:
    user = prompts.fill(prompts.DRAFT_USER, chapter=chapter.text, scene=scene,
                        characters=", ".join(c.full_name for c in involved))
    return prompts.DRAFT_SYSTEM, user


def draft_script(writer: Agent, chapter: Chapter, scene: str, involved: Sequence[Character]) -> ScriptDraft:
    system, user = draft_prompt(chapter, scene, involved)
    names = [c.full_name for c in involved]
    label = chapter.subplot_label
    try:
        return writer.structured(writer.request(system, user), tags.SCRIPT_DRAFT, Stage.SCREENPLAY,
                                 lambda doc: codec.extract_draft(doc, label, names))
    except StructuredOutputFailure as exc:
        _unwrap(exc, ForeignCharacter, MissingSceneHeading)


# -- role-play -----------------------------------------------------------------------

@dataclass
class ActorContext:
    role_name: str
    role_intro: str
    involved_characters: str
    act_history: list[tuple[DraftEvent, DetailedPerformance]] = field(default_factory=list)

    def system(self) -> str:
        return prompts.fill(prompts.ACT_SYSTEM, role_name=self.role_name, role_intro=self.role_intro)


def render_act_history(history: Iterable[tuple[DraftEvent, DetailedPerformance]]) -> str:
    return "\n".join(codec.render_performance(p).rstrip("\n") for _, p in history)


def act_prompt(actor: ActorContext, event: DraftEvent, scene: SceneHeading) -> str:
    return prompts.fill(
        prompts.ACT_USER,
        examples=prompts.ACT_EXAMPLES,
        guide=event.performance_guide,
        scene=scene.render(),
        characters=actor.involved_characters,
        history=render_act_history(actor.act_history),
    )


def perform_event(actor_agent: Agent, actor: ActorContext, event: DraftEvent, scene: SceneHeading,
                  story_id: str = "") -> DetailedPerformance:
    if event.character != actor.role_name:
        raise ValueError(f"event for {event.character!r} given to the actor of {actor.role_name!r}")
    user = act_prompt(actor, event, scene)
    for attempt in (1, 2):
        req = actor_agent.request(actor.system(), user)
        try:
            perf = actor_agent.structured(req, tags.DETAILED_PERFORMANCE, Stage.SCREENPLAY,
                                          codec.extract_performance)
        except StructuredOutputFailure as exc:
            _unwrap(exc, ConstraintViolation)
        if perf.character == actor.role_name:
            return perf
        if attempt == 1:
            actor_agent.gateway.failure_log.add(
                FailureRecord(Stage.SCREENPLAY.value, 1, RoleMismatch.kind, story_id))
            user = f"{user}\n{prompts.fill(prompts.ROLE_CORRECTION, role_name=actor.role_name)}"
    raise RoleMismatch(f"expected {actor.role_name!r}, actor answered as {perf.character!r}")


def role_play_episode(actor_agent: Agent, draft: ScriptDraft, cast: Sequence[Character],
                      story_id: str = "") -> Episode:
    """Realize each event with the actor of its character.

    All actors of the episode share one history, so each sees every
    earlier performance of this episode and nothing from other episodes.
    """
    intros = codec.render_introductions(cast)
    history: list[tuple[DraftEvent, DetailedPerformance]] = []
    actors = {c.full_name: ActorContext(c.full_name, c.introduction, intros, history) for c in cast}
    perfs = []
    for event in draft.events:
        actor = actors.get(event.character)
        if actor is None:
            raise ForeignCharacter(event.character)
        perf = perform_event(actor_agent, actor, event, draft.scene_heading, story_id)
        history.append((event, perf))
        perfs.append(perf)
    return Episode(draft.subplot_label, draft.scene_heading, tuple(perfs))


def direct_episode(writer: Agent, draft: ScriptDraft, cast: Sequence[Character]) -> Episode:
    """Ablation without role-play: one third-person call for the whole draft."""
    inner = codec.render_draft(draft).strip("\n")
    inner = inner.removeprefix("<script_draft>\n").removesuffix("\n</script_draft>")
    user = prompts.fill(prompts.DIRECT_USER, draft=inner, characters=codec.render_introductions(cast))
    names = [c.full_name for c in cast]
    return writer.structured(
        writer.request(prompts.DIRECT_SYSTEM, user), tags.EPISODE, Stage.SCREENPLAY,
        lambda doc: codec.extract_episode(doc, draft.subplot_label, draft.scene_heading, names),
    )


# -- Plan-then-Write baseline ------------------------------------------------------------

def plan_then_write_episode(writer: Agent, storyline: Storyline, characters: CharacterSet, outline: Outline,
                            subplot: Subplot, previous: Episode | None = None) -> Episode:
    """Write one episode straight from the outline, guided by a single example episode."""
    involved = characters.subset(subplot.involved_characters) or tuple(characters)
    user = prompts.fill(
        prompts.PTW_USER,
        example=prompts.PTW_EXAMPLE,
        storyline=storyline.text,
        characters=codec.render_characters_inner(characters),
        outline=codec.render_outline_inner(outline),
        previous=codec.render_episode_text(previous) if previous is not None else "",
        plot=subplot.plot_text,
        scene=subplot.scene,
        involved=", ".join(c.full_name for c in involved),
    )
    names = [c.full_name for c in involved]
    return writer.structured(
        writer.request(prompts.PTW_SYSTEM, user), tags.EPISODE, Stage.SCREENPLAY,
        lambda doc: codec.extract_episode(doc, subplot.label, None, names),
    )


# -- assembly ---------------------------------------------------------------------------

def assemble_screenplay(episodes: Iterable[Episode], outline: Outline) -> Screenplay:
    by_label: dict[PlotLabel, Episode] = {}
    for ep in episodes:
        if ep.subplot_label in by_label:
            raise DuplicateEpisode(str(ep.subplot_label))
        by_label[ep.subplot_label] = ep
    ordered = []
    for label in outline.labels:
        if label not in by_label:
            raise MissingEpisode(str(label))
        ordered.append(by_label.pop(label))
    if by_label:
        logger.warning("dropping episodes not in the outline: %s", sorted(map(str, by_label)))
    return Screenplay(tuple(ordered))


# -- stage driver ------------------------------------------------------------------------

def draft_file(label: PlotLabel) -> str:
    return f"draft_{label}.tags"


def episode_file(label: PlotLabel) -> str:
    return f"episode_{label}.tags"


def load_draft(store: StoryStore, label: PlotLabel) -> ScriptDraft:
    return codec.extract_draft(tags.parse_tag_document(store.read(draft_file(label)), tags.SCRIPT_DRAFT), label)


def load_episode(store: StoryStore, label: PlotLabel) -> Episode:
    return codec.extract_episode(tags.parse_tag_document(store.read(episode_file(label)), tags.EPISODE), label)


def _stage_failure(agent: Agent, story_id: str, exc: Exception) -> StageFailure:
    agent.gateway.failure_log.stage_failed(Stage.SCREENPLAY, story_id)
    return StageFailure(Stage.SCREENPLAY.value, story_id, exc)


def write_drafts(writer: Agent, outline: Outline, characters: CharacterSet, chapters: Sequence[Chapter],
                 store: StoryStore | None = None, story_id: str = "") -> list[ScriptDraft]:
    drafts = []
    for sub, chapter in zip(outline.subplots, chapters, strict=True):
        if store is not None and store.exists(draft_file(sub.label)):
            drafts.append(load_draft(store, sub.label))
            continue
        try:
            d = draft_script(writer, chapter, sub.scene, characters.subset(sub.involved_characters))
        except (StructuredOutputFailure, FormatError) as exc:
            raise _stage_failure(writer, story_id, exc) from exc
        drafts.append(d)
        if store is not None:
            store.write(draft_file(sub.label), codec.render_draft(d))
            store.log(SCREENPLAY_LOG, f"{sub.label}: draft with {len(d.events)} events")
    return drafts


def realize_episodes(writer: Agent, actor: Agent, outline: Outline, characters: CharacterSet,
                     drafts: Sequence[ScriptDraft], *, role_play: bool = True,
                     store: StoryStore | None = None, story_id: str = "") -> list[Episode]:
    episodes = []
    for sub, draft in zip(outline.subplots, drafts, strict=True):
        if store is not None and store.exists(episode_file(sub.label)):
            episodes.append(load_episode(store, sub.label))
            continue
        cast = characters.subset(sub.involved_characters)
        try:
            if role_play:
                ep = role_play_episode(actor, draft, cast, story_id)
            else:
                ep = direct_episode(writer, draft, cast)
        except (StructuredOutputFailure, FormatError) as exc:
            raise _stage_failure(actor if role_play else writer, story_id, exc) from exc
        episodes.append(ep)
        if store is not None:
            store.write(episode_file(sub.label), codec.render_episode(ep))
            store.log(SCREENPLAY_LOG, f"{sub.label}: episode with {len(ep.performances)} performances"
                                      f" ({'role-play' if role_play else 'direct'})")
    return episodes


def write_screenplay(screenplay: Screenplay, store: StoryStore | None) -> str:
    text = codec.render_screenplay(screenplay)
    if store is not None:
        store.write(SCREENPLAY_FILE, text)
    return text


def generate_screenplay(writer: Agent, actor: Agent, outline: Outline, characters: CharacterSet,
                        chapters: Sequence[Chapter], *, role_play: bool = True,
                        store: StoryStore | None = None, story_id: str = "") -> Screenplay:
    drafts = write_drafts(writer, outline, characters, chapters, store, story_id)
    episodes = realize_episodes(writer, actor, outline, characters, drafts,
                                role_play=role_play, store=store, story_id=story_id)
    screenplay = assemble_screenplay(episodes, outline)
    write_screenplay(screenplay, store)
    return screenplay


def generate_plan_then_write(writer: Agent, storyline: Storyline, characters: CharacterSet, outline: Outline,
                             *, store: StoryStore | None = None, story_id: str = "") -> Screenplay:
    episodes: list[Episode] = []
    for sub in outline.subplots:
        if store is not None and store.exists(episode_file(sub.label)):
            episodes.append(load_episode(store, sub.label))
            continue
        try:
            ep = plan_then_write_episode(writer, storyline, characters, outline, sub,
                                         episodes[-1] if episodes else None)
        except StructuredOutputFailure as exc:
            raise _stage_failure(writer, story_id, exc) from exc
        episodes.append(ep)
        if store is not None:
            store.write(episode_file(sub.label), codec.render_episode(ep))
    screenplay = assemble_screenplay(episodes, outline)
    write_screenplay(screenplay, store)
    return screenplay
