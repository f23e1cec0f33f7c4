"""Conversions between tag documents and domain artifacts, plus the plain-text
screenplay renderer."""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

from . import tags
from .errors import (
    ArityViolation,
    CardinalityOutOfRange,
    ForeignCharacter,
    InvalidArtifact,
    LabelGap,
    MissingMarker,
    MissingSceneHeading,
    OrphanSubplot,
    UnknownCharacterName,
)
from .model import (
    MAX_CHARACTERS,
    MIN_CHARACTERS,
    Advice,
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
    Subplot,
    TopPlot,
    parse_scene_heading,
)
from .tags import TagDocument, TagNode, leaf, render_document

logger = logging.getLogger(__name__)

SCENE_MARKER = "Scene:"
CHARACTERS_MARKER = "Characters:"


# -- characters ---------------------------------------------------------------

def extract_characters(
    doc: TagDocument, min_characters: int = MIN_CHARACTERS, max_characters: int = MAX_CHARACTERS
) -> CharacterSet:
    nodes = doc.root("characters").all(r"character_[0-9]+")
    if not min_characters <= len(nodes) <= max_characters:
        raise CardinalityOutOfRange(
            f"{len(nodes)} characters, expected {min_characters}..{max_characters}"
        )
    return CharacterSet(tuple(
        Character(n.get_text("full_name"), n.get_text("character_introduction")) for n in nodes
    ))


def characters_node(cs: CharacterSet) -> TagNode:
    return TagNode("characters", tuple(
        TagNode(f"character_{i}", (
            leaf("full_name", c.full_name),
            leaf("character_introduction", c.introduction),
        ))
        for i, c in enumerate(cs, start=1)
    ))


def render_characters(cs: CharacterSet) -> str:
    return render_document(TagDocument((characters_node(cs),)))


def render_characters_inner(cs: CharacterSet) -> str:
    """The ``<character_i>`` blocks without the enclosing ``<characters>`` pair."""
    return "\n".join(tags.render_node(n) for n in characters_node(cs).children)


def render_introductions(characters: Iterable[Character], first_appearance: Iterable[str] = (),
                         remark: str = "") -> str:
    """One ``Name: introduction`` line per character, used inside prompts."""
    flagged = set(first_appearance)
    lines = []
    for c in characters:
        line = f"{c.full_name}: {c.introduction}"
        if c.full_name in flagged and remark:
            line = f"{line} {remark}"
        lines.append(line)
    return "\n".join(lines)


# -- outline ------------------------------------------------------------------

def _strip_period(s: str) -> str:
    s = s.strip()
    return s[:-1].rstrip() if s.endswith(".") else s


def split_plot_body(body: str) -> tuple[str, str, tuple[str, ...]]:
    """Split a plot body into (plot_text, scene, character names).

    The last ``Characters:`` marker and the last ``Scene:`` marker before it
    delimit the fields, so earlier prose may mention either word.
    """
    ci = body.rfind(CHARACTERS_MARKER)
    if ci < 0:
        raise MissingMarker(f"plot body has no {CHARACTERS_MARKER!r} marker: {body[:60]!r}")
    si = body.rfind(SCENE_MARKER, 0, ci)
    if si < 0:
        raise MissingMarker(f"plot body has no {SCENE_MARKER!r} marker: {body[:60]!r}")
    plot_text = body[:si].strip()
    scene = _strip_period(body[si + len(SCENE_MARKER):ci])
    names = tuple(
        n for n in (_strip_period(x) for x in body[ci + len(CHARACTERS_MARKER):].split(",")) if n
    )
    return plot_text, scene, names


def extract_outline(doc: TagDocument, characters: CharacterSet | None = None,
                    strict: bool = True) -> Outline:
    known = set(characters.names) if characters is not None else None
    tops: list[tuple[PlotLabel, str, str, tuple[str, ...], list[Subplot]]] = []
    for node in doc.root("outline").all(r"plot_[1-9][0-9]*[a-z]*"):
        if not PlotLabel.matches(node.name):
            raise LabelGap(f"{node.name}: at most 26 subplots (a-z) per top-level plot")
        label = PlotLabel.parse(node.name)
        plot_text, scene, names = split_plot_body(node.text)
        if known is not None:
            for name in names:
                if name not in known:
                    if strict:
                        raise UnknownCharacterName(f"{label} involves unknown character {name!r}")
                    logger.warning("%s involves unknown character %r (kept)", label, name)
        if not label.is_subplot:
            if label.top_index != len(tops) + 1:
                raise LabelGap(f"expected plot_{len(tops) + 1}, found {label}")
            tops.append((label, plot_text, scene, names, []))
            continue
        if not tops or tops[-1][0].top_index != label.top_index:
            raise OrphanSubplot(f"{label} has no preceding plot_{label.top_index}")
        subs = tops[-1][4]
        if label.sub_index != len(subs) + 1:
            raise LabelGap(f"expected subplot #{len(subs) + 1} of plot_{label.top_index}, found {label}")
        subs.append(Subplot(label, plot_text, scene, names))
    if not tops:
        raise InvalidArtifact("outline contains no plots")
    return Outline(tuple(TopPlot(lab, text, scene, names, tuple(subs))
                         for lab, text, scene, names, subs in tops))


def _plot_body(plot_text: str, scene: str, names: Sequence[str]) -> str:
    scene_part = f"{scene}. " if scene else ""
    return f"{plot_text}\n{SCENE_MARKER} {scene_part}{CHARACTERS_MARKER} {', '.join(names)}"


def outline_node(outline: Outline) -> TagNode:
    kids = []
    for top in outline.top_plots:
        kids.append(leaf(str(top.label), _plot_body(top.plot_text, top.scene, top.involved_characters)))
        for sub in top.subplots:
            kids.append(leaf(str(sub.label), _plot_body(sub.plot_text, sub.scene, sub.involved_characters)))
    return TagNode("outline", tuple(kids))


def render_outline(outline: Outline) -> str:
    return render_document(TagDocument((outline_node(outline),)))


def render_outline_inner(outline: Outline) -> str:
    return "\n".join(tags.render_node(n) for n in outline_node(outline).children)


# -- advice / chapter -----------------------------------------------------------

def extract_advice(doc: TagDocument) -> Advice:
    return Advice.from_body(doc.root("advice").text)


def render_advice(advice: Advice) -> str:
    return render_document(TagDocument((leaf("advice", advice.body),)))


def extract_chapter(doc: TagDocument, label: PlotLabel) -> Chapter:
    return Chapter(label, doc.root("chapter").text)


def render_chapter(chapter: Chapter) -> str:
    return render_document(TagDocument((leaf("chapter", chapter.text),)))


# -- script drafts --------------------------------------------------------------

def extract_draft(doc: TagDocument, label: PlotLabel, involved: Iterable[str] | None = None) -> ScriptDraft:
    root = doc.root("script_draft")
    headings = root.all("scene_heading")
    if not headings:
        raise MissingSceneHeading(f"draft {label} has no scene heading")
    if len(headings) > 1:
        raise ArityViolation("scene_heading", len(headings), 1, 1)
    if root.children[0].name != "scene_heading":
        raise MissingSceneHeading(f"draft {label}: the scene heading must precede all events")
    allowed = set(involved) if involved is not None else None
    events = []
    for node in root.all("character_performance"):
        name = node.get_text("character")
        if allowed is not None and name not in allowed:
            raise ForeignCharacter(name)
        events.append(DraftEvent(name, node.get_text("performance")))
    return ScriptDraft(label, parse_scene_heading(headings[0].text), tuple(events))


def render_draft(draft: ScriptDraft) -> str:
    kids = [leaf("scene_heading", draft.scene_heading.render())]
    for ev in draft.events:
        kids.append(TagNode("character_performance", (
            leaf("character", ev.character),
            leaf("performance", ev.performance_guide),
        )))
    return render_document(TagDocument((TagNode("script_draft", tuple(kids)),)))


# -- performances and episodes ------------------------------------------------------

def performance_from_node(node: TagNode) -> DetailedPerformance:
    return DetailedPerformance(
        character=node.get_text("character"),
        action=node.get_text("action"),
        parenthetical=node.get_text("parenthetical"),
        dialogue=node.get_text("dialogue"),
    )


def extract_performance(doc: TagDocument) -> DetailedPerformance:
    return performance_from_node(doc.root("detailed_performance"))


def performance_node(p: DetailedPerformance) -> TagNode:
    return TagNode("detailed_performance", (
        leaf("character", p.character),
        leaf("action", p.action),
        leaf("parenthetical", p.parenthetical),
        leaf("dialogue", p.dialogue),
    ))


def render_performance(p: DetailedPerformance) -> str:
    return tags.render_node(performance_node(p))


def extract_episode(doc: TagDocument, label: PlotLabel, heading: SceneHeading | None = None,
                    involved: Iterable[str] | None = None) -> Episode:
    """Build an episode; ``heading`` (from the draft) overrides any heading in ``doc``."""
    root = doc.root("episode")
    if heading is None:
        nodes = root.all("scene_heading")
        if not nodes:
            raise MissingSceneHeading(f"episode {label} has no scene heading")
        heading = parse_scene_heading(nodes[0].text)
    allowed = set(involved) if involved is not None else None
    perfs = []
    for node in root.all("detailed_performance"):
        p = performance_from_node(node)
        if allowed is not None and p.character not in allowed:
            raise ForeignCharacter(p.character)
        perfs.append(p)
    return Episode(label, heading, tuple(perfs))


def render_episode(ep: Episode) -> str:
    kids = [leaf("scene_heading", ep.scene_heading.render())]
    kids.extend(performance_node(p) for p in ep.performances)
    return render_document(TagDocument((TagNode("episode", tuple(kids)),)))


# -- plain-text screenplay -------------------------------------------------------------

def _flat(text: str) -> str:
    return " ".join(text.split())


def _wrap_parenthetical(text: str) -> str:
    text = _flat(text)
    return text if text.startswith("(") and text.endswith(")") else f"({text})"


def render_episode_text(ep: Episode) -> str:
    lines = [ep.scene_heading.render()]
    for p in ep.performances:
        lines.append(f"{_flat(p.character)}:")
        if p.action:
            lines.append(f"[{_flat(p.action)}]")
        if p.parenthetical:
            lines.append(_wrap_parenthetical(p.parenthetical))
        if p.dialogue:
            lines.append(_flat(p.dialogue))
    return "\n".join(lines)


def render_screenplay(s: Screenplay) -> str:
    """Scene heading, then ``Name:`` / ``[action]`` / ``(parenthetical)`` / dialogue lines.

    Episodes are separated by one blank line.
    """
    return "\n\n".join(render_episode_text(e) for e in s.episodes) + "\n"


def parse_screenplay(text: str, labels: Sequence[PlotLabel], names: Iterable[str] | None = None) -> Screenplay:
    """Inverse of :func:`render_screenplay`; episode labels come from the outline."""
    known = set(names) if names is not None else None
    blocks = [b for b in text.strip("\n").split("\n\n")]
    if len(blocks) != len(labels):
        raise InvalidArtifact(f"{len(blocks)} episodes in text, {len(labels)} labels given")

    def is_name(line: str) -> bool:
        return line.endswith(":") and (known is None or line[:-1] in known)

    episodes = []
    for label, block in zip(labels, blocks):
        lines = block.split("\n")
        heading = parse_scene_heading(lines[0])
        perfs: list[DetailedPerformance] = []
        cur: dict | None = None
        for line in lines[1:]:
            if cur is None or cur["dialogue"] or ((cur["action"] or cur["dialogue"]) and is_name(line)):
                if not is_name(line):
                    raise InvalidArtifact(f"{label}: expected a character line, got {line!r}")
                if cur is not None:
                    perfs.append(DetailedPerformance(**cur))
                cur = {"character": line[:-1], "action": "", "parenthetical": "", "dialogue": ""}
            elif line.startswith("[") and line.endswith("]") and not (cur["action"] or cur["parenthetical"]):
                cur["action"] = line[1:-1]
            elif line.startswith("(") and line.endswith(")") and not cur["parenthetical"]:
                cur["parenthetical"] = line
            else:
                cur["dialogue"] = line
        if cur is not None:
            perfs.append(DetailedPerformance(**cur))
        episodes.append(Episode(label, heading, tuple(perfs)))
    return Screenplay(tuple(episodes))
