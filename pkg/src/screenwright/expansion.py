"""Stage 2: expand each subplot into a chapter.

The context for subplot k holds the nearest ``n`` chapters verbatim and the
raw subplot texts for everything before that window. Subplots form one flat
sequence, so the window crosses top-plot boundaries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import codec, prompts, tags
from .checkpoints import StoryStore
from .errors import ConfigError, OutOfOrderExpansion, StageFailure, StructuredOutputFailure, UnknownLabel
from .gateway import Agent, Stage
from .model import Chapter, Character, CharacterSet, Outline, PlotLabel, Storyline, Subplot

logger = logging.getLogger(__name__)

EXPANSION_LOG = "expansion.log"


@dataclass(frozen=True)
class ExpansionConfig:
    context_chapters: int = 1

    def __post_init__(self):
        if self.context_chapters < 0:
            raise ConfigError("context_chapters must be >= 0")


@dataclass(frozen=True)
class ExpansionContext:
    current: Subplot
    scene: str
    involved: tuple[tuple[Character, bool], ...]  # (character, first appearance?)
    recent_chapters: tuple[Chapter, ...]
    earlier_subplots_raw: tuple[str, ...]
    is_last: bool
    index: int  # 1-based position of ``current`` in the outline

    @property
    def first_appearances(self) -> tuple[str, ...]:
        return tuple(c.full_name for c, first in self.involved if first)


def build_expansion_context(outline: Outline, characters: CharacterSet, chapters_so_far,
                            label: PlotLabel, config: ExpansionConfig | None = None) -> ExpansionContext:
    config = config or ExpansionConfig()
    subs = outline.subplots
    try:
        k = outline.labels.index(label)
    except ValueError:
        raise UnknownLabel(f"{label} is not a subplot of the outline") from None
    done = [c.subplot_label for c in chapters_so_far]
    if done != list(outline.labels[:k]):
        raise OutOfOrderExpansion(
            f"expanding {label} needs chapters {[str(x) for x in outline.labels[:k]]}, have {[str(x) for x in done]}"
        )
    window = min(config.context_chapters, k)
    recent = tuple(chapters_so_far[k - window:k])
    earlier = tuple(s.plot_text for s in subs[:k - window])

    seen = {n for s in subs[:k] for n in s.involved_characters}
    involved = []
    for name in subs[k].involved_characters:
        c = characters.get(name)
        if c is None:
            logger.warning("%s: no introduction for %r", label, name)
            continue
        involved.append((c, name not in seen))
    return ExpansionContext(
        current=subs[k],
        scene=subs[k].scene,
        involved=tuple(involved),
        recent_chapters=recent,
        earlier_subplots_raw=earlier,
        is_last=k == len(subs) - 1,
        index=k + 1,
    )


def expansion_prompt(ctx: ExpansionContext, storyline: Storyline) -> tuple[str, str]:
    chars = codec.render_introductions(
        (c for c, _ in ctx.involved), ctx.first_appearances, prompts.FIRST_APPEARANCE_REMARK
    )
    user = prompts.fill(
        prompts.EXPAND_USER,
        plot=ctx.current.plot_text,
        storyline=storyline.text,
        scene=ctx.scene,
        characters=chars,
        earlier_plots="\n".join(ctx.earlier_subplots_raw),
        recent_chapters="\n".join(ch.text for ch in ctx.recent_chapters),
        ending=prompts.LAST_PLOT_NOTE if ctx.is_last else "",
    )
    return prompts.EXPAND_SYSTEM, user


def expand_subplot(writer: Agent, ctx: ExpansionContext, storyline: Storyline) -> Chapter:
    system, user = expansion_prompt(ctx, storyline)
    label = ctx.current.label
    return writer.structured(writer.request(system, user), tags.CHAPTER, Stage.EXPANSION,
                             lambda doc: codec.extract_chapter(doc, label))


def chapter_file(label: PlotLabel) -> str:
    return f"chapter_{label}.tags"


def load_chapter(store: StoryStore, label: PlotLabel) -> Chapter:
    doc = tags.parse_tag_document(store.read(chapter_file(label)), tags.CHAPTER)
    return codec.extract_chapter(doc, label)


def expand_all(writer: Agent, outline: Outline, characters: CharacterSet, storyline: Storyline,
               config: ExpansionConfig | None = None, store: StoryStore | None = None,
               story_id: str = "") -> list[Chapter]:
    """Expand subplots left to right, reusing chapter checkpoints already on disk."""
    config = config or ExpansionConfig()
    chapters: list[Chapter] = []
    for label in outline.labels:
        if store is not None and store.exists(chapter_file(label)):
            chapters.append(load_chapter(store, label))
            continue
        ctx = build_expansion_context(outline, characters, chapters, label, config)
        try:
            chapter = expand_subplot(writer, ctx, storyline)
        except StructuredOutputFailure as exc:
            writer.gateway.failure_log.stage_failed(Stage.EXPANSION, story_id)
            raise StageFailure(Stage.EXPANSION.value, story_id, exc) from exc
        chapters.append(chapter)
        if store is not None:
            store.write(chapter_file(label), codec.render_chapter(chapter))
            store.log(EXPANSION_LOG, (
                f"{label}: recent={[str(c.subplot_label) for c in ctx.recent_chapters]} "
                f"raw_subplots={len(ctx.earlier_subplots_raw)} "
                f"first_appearance={list(ctx.first_appearances)} last={ctx.is_last}"
            ))
    return chapters
