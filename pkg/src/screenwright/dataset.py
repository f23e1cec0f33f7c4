"""Synthetic storyline dataset: generation per genre and word-count statistics."""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import prompts, tags
from .errors import ConfigError, EmptyResults, InvalidArtifact, StructuredOutputFailure
from .gateway import Agent, Stage
from .model import Genre, Storyline, word_count

logger = logging.getLogger(__name__)

INDEX_FILE = "index.csv"


@dataclass(frozen=True)
class SynthConfig:
    genres: tuple[Genre, ...] = tuple(Genre)
    per_genre: int = 10
    target_words: int = 120

    def __post_init__(self):
        object.__setattr__(self, "genres", tuple(self.genres))
        if self.per_genre < 1:
            raise ConfigError("per_genre must be >= 1")
        if not self.genres:
            raise ConfigError("at least one genre is required")
        if self.target_words < 1:
            raise ConfigError("target_words must be positive")


def synth_request(agent: Agent, genre: Genre, config: SynthConfig):
    user = prompts.fill(prompts.SYNTH_USER, genre=genre.value, words=str(config.target_words))
    return agent.request(prompts.SYNTH_SYSTEM, user)


def synthesize_storyline(agent: Agent, genre: Genre, config: SynthConfig | None = None) -> Storyline:
    """Ask for a storyline; one regeneration if it falls outside the soft word bound."""
    config = config or SynthConfig()
    if genre not in config.genres:
        raise ConfigError(f"{genre.value} is not among the configured genres")

    def validate(doc):
        body = doc.root("storyline").text
        if not body:
            raise InvalidArtifact("empty storyline")
        return Storyline(genre, body)

    story = None
    for attempt in (1, 2):
        story = agent.structured(synth_request(agent, genre, config), tags.STORYLINE, Stage.SYNTH, validate)
        if story.within_soft_bound:
            return story
        logger.warning("%s storyline has %d words (attempt %d)", genre.value, story.words, attempt)
    return story


@dataclass
class Dataset:
    items: list[tuple[str, Storyline]] = field(default_factory=list)  # (item id, storyline)

    def __len__(self) -> int:
        return len(self.items)

    def by_genre(self) -> dict[Genre, list[Storyline]]:
        out: dict[Genre, list[Storyline]] = defaultdict(list)
        for _, s in self.items:
            out[s.genre].append(s)
        return dict(out)


def item_id(genre: Genre, i: int) -> str:
    return f"{genre.slug}_{i}"


def synthesize_dataset(agent: Agent, config: SynthConfig | None = None, out_dir: Path | str | None = None,
                       skip_failures: bool = True) -> Dataset:
    config = config or SynthConfig()
    ds = Dataset()
    for genre in config.genres:
        for i in range(1, config.per_genre + 1):
            try:
                story = synthesize_storyline(agent, genre, config)
            except StructuredOutputFailure:
                if not skip_failures:
                    raise
                logger.error("giving up on %s", item_id(genre, i))
                agent.gateway.failure_log.stage_failed(Stage.SYNTH, item_id(genre, i))
                continue
            ds.items.append((item_id(genre, i), story))
    if out_dir is not None:
        save_dataset(ds, out_dir)
    return ds


def save_dataset(ds: Dataset, out_dir: Path | str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for sid, story in ds.items:
        (out / f"{sid}.txt").write_text(story.text.strip() + "\n", encoding="utf-8")
    with open(out / INDEX_FILE, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "genre", "words"])
        for sid, story in ds.items:
            w.writerow([sid, story.genre.value, story.words])


def load_dataset(root: Path | str) -> Dataset:
    root = Path(root)
    ds = Dataset()
    with open(root / INDEX_FILE, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            text = (root / f"{row['id']}.txt").read_text(encoding="utf-8").strip()
            ds.items.append((row["id"], Storyline(Genre.parse(row["genre"]), text)))
    return ds


@dataclass(frozen=True)
class GenreStats:
    size: int
    avg: float
    min: int
    max: int


def _stats(counts: Sequence[int]) -> GenreStats:
    return GenreStats(len(counts), sum(counts) / len(counts), min(counts), max(counts))


def dataset_stats(storylines: Iterable[Storyline] | Dataset) -> dict[str, GenreStats]:
    """Word-count statistics per genre value plus a ``"Total"`` row."""
    if isinstance(storylines, Dataset):
        storylines = (s for _, s in storylines.items)
    per: dict[Genre, list[int]] = defaultdict(list)
    for s in storylines:
        per[s.genre].append(word_count(s.text))
    if not per:
        raise EmptyResults("empty dataset")
    out = {g.value: _stats(per[g]) for g in Genre if g in per}
    out["Total"] = _stats([c for cs in per.values() for c in cs])
    return out


def format_stats(stats: dict[str, GenreStats]) -> str:
    lines = [f"{'Genre':<18}{'Size':>6}{'Avg':>9}{'Min':>6}{'Max':>6}"]
    for name, s in stats.items():
        lines.append(f"{name:<18}{s.size:>6}{s.avg:>9.1f}{s.min:>6}{s.max:>6}")
    return "\n".join(lines) + "\n"
