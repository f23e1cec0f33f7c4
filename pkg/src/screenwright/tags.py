"""HTML-style tag format used for every model input, output and checkpoint.

The format is deliberately tiny: ``<name>`` ... ``</name>`` pairs, no
attributes, no entities, case-sensitive names. Parsing is driven by a schema
so that only the tags we expect are treated as structure; anything else
(including stray ``<b>``-like text) stays inside leaf text.

Canonical rendering: one tag per line, no indentation, ``\\n`` line endings,
leaf bodies inline (``<name>text</name>``), empty bodies as ``<name></name>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ArityViolation, MissingTag, UnbalancedTag


@dataclass(frozen=True)
class TagNode:
    name: str
    children: tuple[TagNode, ...] = ()
    text: str = ""

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def all(self, pattern: str) -> list[TagNode]:
        rx = re.compile(pattern)
        return [c for c in self.children if rx.fullmatch(c.name)]

    def child(self, name: str) -> TagNode:
        for c in self.children:
            if c.name == name:
                return c
        raise MissingTag(name)

    def get_text(self, name: str, default: str = "") -> str:
        for c in self.children:
            if c.name == name:
                return c.text
        return default


@dataclass(frozen=True)
class TagDocument:
    roots: tuple[TagNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))

    def root(self, name: str) -> TagNode:
        for r in self.roots:
            if r.name == name:
                return r
        raise MissingTag(name)


@dataclass(frozen=True)
class TagSpec:
    """One expected tag. ``pattern`` is a regex matched against the whole name.

    A spec with no children is a leaf whose body is kept as stripped text.
    """

    pattern: str
    min: int = 1
    max: int | None = 1
    children: tuple[TagSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def matches(self, name: str) -> bool:
        return re.fullmatch(self.pattern, name) is not None


@dataclass(frozen=True)
class TagSchema:
    name: str
    roots: tuple[TagSpec, ...] = field(default_factory=tuple)


_OPEN = re.compile(r"<([A-Za-z_][A-Za-z0-9_]*)>")


def _byte_offset(raw: str, i: int) -> int:
    return len(raw[:i].encode("utf-8"))


def _parse_region(raw: str, start: int, end: int, specs: tuple[TagSpec, ...]) -> list[TagNode]:
    nodes: list[TagNode] = []
    counts = [0] * len(specs)
    pos = start
    while True:
        m = _OPEN.search(raw, pos, end)
        if m is None:
            break
        name = m.group(1)
        idx = next((k for k, s in enumerate(specs) if s.matches(name)), None)
        if idx is None:
            pos = m.end()
            continue
        close = raw.find(f"</{name}>", m.end(), end)
        if close < 0:
            raise UnbalancedTag(name, offset=_byte_offset(raw, m.start()))
        spec = specs[idx]
        if spec.children:
            kids = _parse_region(raw, m.end(), close, spec.children)
            nodes.append(TagNode(name, kids))
        else:
            nodes.append(TagNode(name, (), raw[m.end():close].strip()))
        counts[idx] += 1
        pos = close + len(name) + 3
    for spec, n in zip(specs, counts):
        if n < spec.min:
            if n == 0:
                raise MissingTag(spec.pattern, offset=_byte_offset(raw, start))
            raise ArityViolation(spec.pattern, n, spec.min, spec.max, offset=_byte_offset(raw, start))
        if spec.max is not None and n > spec.max:
            raise ArityViolation(spec.pattern, n, spec.min, spec.max, offset=_byte_offset(raw, start))
    return nodes


def parse_tag_document(raw: str, schema: TagSchema) -> TagDocument:
    """Parse model output against ``schema``; prose around the tags is ignored."""
    return TagDocument(_parse_region(raw, 0, len(raw), schema.roots))


def render_node(node: TagNode) -> str:
    if node.children:
        inner = "\n".join(render_node(c) for c in node.children)
        return f"<{node.name}>\n{inner}\n</{node.name}>"
    return f"<{node.name}>{node.text}</{node.name}>"


def render_document(doc: TagDocument) -> str:
    return "".join(render_node(r) + "\n" for r in doc.roots)


def canonicalize(raw: str, schema: TagSchema) -> str:
    return render_document(parse_tag_document(raw, schema))


def leaf(name: str, text: str) -> TagNode:
    return TagNode(name, (), text)


# -- schemas for every artifact the pipeline exchanges ----------------------

CHARACTERS = TagSchema("characters", (
    TagSpec("characters", children=(
        TagSpec(r"character_[0-9]+", min=1, max=None, children=(
            TagSpec("full_name"),
            TagSpec("character_introduction"),
        )),
    )),
))

OUTLINE = TagSchema("outline", (
    TagSpec("outline", children=(
        TagSpec(r"plot_[1-9][0-9]*[a-z]*", min=1, max=None),
    )),
))

ADVICE = TagSchema("advice", (TagSpec("advice"),))

CHAPTER = TagSchema("chapter", (TagSpec("chapter"),))

STORYLINE = TagSchema("storyline", (TagSpec("storyline"),))

_PERFORMANCE_FIELDS = (
    TagSpec("character"),
    TagSpec("action"),
    TagSpec("parenthetical"),
    TagSpec("dialogue"),
)

# scene_heading is optional here so a missing heading surfaces as
# MissingSceneHeading from the draft extractor rather than a bare MissingTag.
SCRIPT_DRAFT = TagSchema("script_draft", (
    TagSpec("script_draft", children=(
        TagSpec("scene_heading", min=0, max=None),
        TagSpec("character_performance", min=1, max=None, children=(
            TagSpec("character"),
            TagSpec("performance"),
        )),
    )),
))

DETAILED_PERFORMANCE = TagSchema("detailed_performance", (
    TagSpec("detailed_performance", children=_PERFORMANCE_FIELDS),
))

EPISODE = TagSchema("episode", (
    TagSpec("episode", children=(
        TagSpec("scene_heading", min=0, max=1),
        TagSpec("detailed_performance", min=1, max=None, children=_PERFORMANCE_FIELDS),
    )),
))

VERDICT = TagSchema("verdict", (
    TagSpec("explanation"),
    TagSpec("verdict"),
))

ALL_SCHEMAS = {
    s.name: s
    for s in (CHARACTERS, OUTLINE, ADVICE, CHAPTER, STORYLINE, SCRIPT_DRAFT,
              DETAILED_PERFORMANCE, EPISODE, VERDICT)
}
