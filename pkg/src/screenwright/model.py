"""Immutable value types for every pipeline artifact."""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field

from .errors import (
    CardinalityOutOfRange,
    ComponentCount,
    ConstraintViolation,
    DuplicateName,
    EmptyTopPlot,
    InvalidArtifact,
    LabelGap,
)

MIN_CHARACTERS = 3
MAX_CHARACTERS = 6
SOFT_STORYLINE_WORDS = (50, 300)


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs in ``text``."""
    return len(text.split())


class Genre(enum.Enum):
    Romance = "Romance"
    ScienceFiction = "Science Fiction"
    Horror = "Horror"
    Drama = "Drama"
    Crime = "Crime"
    Comedy = "Comedy"

    @property
    def slug(self) -> str:
        return self.value.lower().replace(" ", "_")

    @classmethod
    def parse(cls, raw: str) -> Genre:
        key = re.sub(r"[^a-z]", "", raw.lower())
        aliases = {"scifi": cls.ScienceFiction}
        if key in aliases:
            return aliases[key]
        for genre in cls:
            if re.sub(r"[^a-z]", "", genre.value.lower()) == key:
                return genre
        raise ValueError(f"unknown genre {raw!r}")


@dataclass(frozen=True)
class Storyline:
    genre: Genre
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise InvalidArtifact("storyline text is empty")

    @property
    def words(self) -> int:
        return word_count(self.text)

    @property
    def within_soft_bound(self) -> bool:
        lo, hi = SOFT_STORYLINE_WORDS
        return lo <= self.words <= hi


@functools.total_ordering
@dataclass(frozen=True)
class PlotLabel:
    top_index: int
    sub_letter: str | None = None

    _PATTERN = re.compile(r"plot_([1-9][0-9]*)([a-z]?)")

    def __post_init__(self):
        if self.top_index < 1:
            raise ValueError("top_index must be positive")
        if self.sub_letter is not None and not re.fullmatch(r"[a-z]", self.sub_letter):
            raise ValueError(f"bad sub letter {self.sub_letter!r}")

    def __lt__(self, other: PlotLabel) -> bool:
        return self._key() < other._key()

    def _key(self):
        return (self.top_index, self.sub_letter or "")

    def __str__(self) -> str:
        return f"plot_{self.top_index}{self.sub_letter or ''}"

    @property
    def is_subplot(self) -> bool:
        return self.sub_letter is not None

    @property
    def sub_index(self) -> int:
        """1 for 'a', 2 for 'b', ...; 0 for a top-level label."""
        return 0 if self.sub_letter is None else ord(self.sub_letter) - ord("a") + 1

    @property
    def top(self) -> PlotLabel:
        return PlotLabel(self.top_index)

    @classmethod
    def parse(cls, raw: str) -> PlotLabel:
        m = cls._PATTERN.fullmatch(raw.strip())
        if m is None:
            raise ValueError(f"not a plot label: {raw!r}")
        return cls(int(m.group(1)), m.group(2) or None)

    @classmethod
    def matches(cls, raw: str) -> bool:
        return cls._PATTERN.fullmatch(raw) is not None


@dataclass(frozen=True)
class Character:
    full_name: str
    introduction: str

    def __post_init__(self):
        if not self.full_name.strip():
            raise InvalidArtifact("character name is empty")
        if "<" in self.full_name or ">" in self.full_name:
            raise InvalidArtifact(f"character name contains angle brackets: {self.full_name!r}")
        if not self.introduction.strip():
            raise InvalidArtifact(f"character {self.full_name!r} has no introduction")


@dataclass(frozen=True)
class CharacterSet:
    characters: tuple[Character, ...]

    def __post_init__(self):
        object.__setattr__(self, "characters", tuple(self.characters))
        n = len(self.characters)
        if not MIN_CHARACTERS <= n <= MAX_CHARACTERS:
            raise CardinalityOutOfRange(
                f"{n} characters, expected {MIN_CHARACTERS}..{MAX_CHARACTERS}"
            )
        seen = set()
        for c in self.characters:
            if c.full_name in seen:
                raise DuplicateName(f"duplicate character name {c.full_name!r}")
            seen.add(c.full_name)

    def __iter__(self):
        return iter(self.characters)

    def __len__(self) -> int:
        return len(self.characters)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.full_name for c in self.characters)

    def get(self, name: str) -> Character | None:
        for c in self.characters:
            if c.full_name == name:
                return c
        return None

    def subset(self, names) -> tuple[Character, ...]:
        """Characters whose names are in ``names``, in ``names`` order; unknown names skipped."""
        return tuple(c for c in (self.get(n) for n in names) if c is not None)


@dataclass(frozen=True)
class Subplot:
    label: PlotLabel
    plot_text: str
    scene: str = ""
    involved_characters: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "involved_characters", tuple(self.involved_characters))
        if not self.label.is_subplot:
            raise ValueError(f"{self.label} is not a subplot label")


@dataclass(frozen=True)
class TopPlot:
    label: PlotLabel
    plot_text: str
    scene: str = ""
    involved_characters: tuple[str, ...] = ()
    subplots: tuple[Subplot, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "involved_characters", tuple(self.involved_characters))
        object.__setattr__(self, "subplots", tuple(self.subplots))
        if self.label.is_subplot:
            raise ValueError(f"{self.label} is not a top-level label")
        if not self.subplots:
            raise EmptyTopPlot(f"{self.label} has no subplots")
        for i, sub in enumerate(self.subplots, start=1):
            if sub.label.top_index != self.label.top_index:
                raise InvalidArtifact(f"{sub.label} filed under {self.label}")
            if sub.label.sub_index != i:
                raise LabelGap(f"expected subplot #{i} of {self.label}, found {sub.label}")


@dataclass(frozen=True)
class Outline:
    top_plots: tuple[TopPlot, ...]

    def __post_init__(self):
        object.__setattr__(self, "top_plots", tuple(self.top_plots))
        if not self.top_plots:
            raise InvalidArtifact("outline has no plots")
        for i, top in enumerate(self.top_plots, start=1):
            if top.label.top_index != i:
                raise LabelGap(f"expected plot_{i}, found {top.label}")

    @property
    def subplots(self) -> tuple[Subplot, ...]:
        return tuple(s for t in self.top_plots for s in t.subplots)

    @property
    def labels(self) -> tuple[PlotLabel, ...]:
        return tuple(s.label for s in self.subplots)

    def subplot(self, label: PlotLabel) -> Subplot:
        for s in self.subplots:
            if s.label == label:
                return s
        raise KeyError(str(label))

    def top_plot(self, label: PlotLabel) -> TopPlot:
        for t in self.top_plots:
            if t.label == label.top:
                return t
        raise KeyError(str(label))


@dataclass(frozen=True)
class Advice:
    """Editor feedback; ``content is None`` is the stop sentinel."""

    content: str | None

    SENTINEL = "None"

    @property
    def is_none(self) -> bool:
        return self.content is None

    @classmethod
    def from_body(cls, body: str) -> Advice:
        body = body.strip()
        return cls(None if body == cls.SENTINEL else body)

    @property
    def body(self) -> str:
        return self.SENTINEL if self.content is None else self.content


@dataclass(frozen=True)
class Chapter:
    subplot_label: PlotLabel
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise InvalidArtifact(f"chapter {self.subplot_label} is empty")


class Placement(enum.Enum):
    INT = "INT."
    EXT = "EXT."
    OTHER = "OTHER"


@dataclass(frozen=True)
class SceneHeading:
    placement: Placement
    location: str
    time_of_day: str
    raw_placement: str = ""

    def __post_init__(self):
        if self.placement is not Placement.OTHER:
            object.__setattr__(self, "raw_placement", self.placement.value)
        for part in (self.raw_placement, self.location, self.time_of_day):
            if not part.strip():
                raise ComponentCount("scene heading has an empty component")

    def render(self) -> str:
        return f"{self.raw_placement}; {self.location}; {self.time_of_day}."


def parse_scene_heading(raw: str) -> SceneHeading:
    """Parse ``"INT.; Inside Emma Taylor's room; DAY."`` style headings."""
    parts = [p.strip() for p in raw.strip().split(";")]
    if len(parts) != 3:
        raise ComponentCount(f"scene heading needs 3 ';'-separated parts, got {len(parts)}: {raw!r}")
    first, location, time_of_day = parts
    time_of_day = time_of_day[:-1].rstrip() if time_of_day.endswith(".") else time_of_day
    if not (first and location and time_of_day):
        raise ComponentCount(f"scene heading has an empty component: {raw!r}")
    if first in ("INT.", "EXT."):
        return SceneHeading(Placement(first), location, time_of_day)
    return SceneHeading(Placement.OTHER, location, time_of_day, raw_placement=first)


@dataclass(frozen=True)
class DraftEvent:
    character: str
    performance_guide: str

    def __post_init__(self):
        if not self.character.strip() or not self.performance_guide.strip():
            raise InvalidArtifact("draft event needs a character and a performance")


@dataclass(frozen=True)
class ScriptDraft:
    subplot_label: PlotLabel
    scene_heading: SceneHeading
    events: tuple[DraftEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if not self.events:
            raise InvalidArtifact(f"draft {self.subplot_label} has no events")


@dataclass(frozen=True)
class DetailedPerformance:
    character: str
    action: str = ""
    parenthetical: str = ""
    dialogue: str = ""

    def __post_init__(self):
        if not self.character.strip():
            raise InvalidArtifact("performance has no character")
        if not self.dialogue and self.parenthetical:
            raise ConstraintViolation(
                f"{self.character}: parenthetical {self.parenthetical!r} without dialogue"
            )
        if not self.action and not self.dialogue:
            raise ConstraintViolation(f"{self.character}: both action and dialogue are empty")


@dataclass(frozen=True)
class Episode:
    subplot_label: PlotLabel
    scene_heading: SceneHeading
    performances: tuple[DetailedPerformance, ...]

    def __post_init__(self):
        object.__setattr__(self, "performances", tuple(self.performances))
        if not self.performances:
            raise InvalidArtifact(f"episode {self.subplot_label} has no performances")


@dataclass(frozen=True)
class Screenplay:
    episodes: tuple[Episode, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "episodes", tuple(self.episodes))
        labels = [e.subplot_label for e in self.episodes]
        if labels != sorted(set(labels)):
            raise InvalidArtifact("episodes must be unique and in outline order")
