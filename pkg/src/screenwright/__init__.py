"""Storyline to screenplay with a Writer, an Editor and role-playing Actors."""

from .errors import ScreenwrightError, StageFailure, StructuredOutputFailure
from .gateway import Agent, ChatRequest, Gateway, GenParams, Stage
from .model import (
    Character,
    CharacterSet,
    Chapter,
    DetailedPerformance,
    Episode,
    Genre,
    Outline,
    PlotLabel,
    Screenplay,
    ScriptDraft,
    Storyline,
)
from .pipeline import PipelineConfig, run_eval, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "ChatRequest",
    "Chapter",
    "Character",
    "CharacterSet",
    "DetailedPerformance",
    "Episode",
    "Gateway",
    "GenParams",
    "Genre",
    "Outline",
    "PipelineConfig",
    "PlotLabel",
    "ScreenwrightError",
    "Screenplay",
    "ScriptDraft",
    "Stage",
    "StageFailure",
    "Storyline",
    "StructuredOutputFailure",
    "run_eval",
    "run_pipeline",
]
