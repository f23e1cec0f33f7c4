"""Offline stand-ins for a chat model.

:class:`DemoModel` recognises each pipeline prompt by its system message and
answers in the expected tag format, deterministically for a given seed and
request. It exists for demos, tests and cassette recording; the text it
writes is filler.
"""

from __future__ import annotations

import hashlib
import random
import re
from typing import Callable

from . import codec, prompts
from .gateway import ChatRequest
from .model import (
    Character,
    CharacterSet,
    DetailedPerformance,
    DraftEvent,
    Episode,
    Outline,
    PlotLabel,
    SceneHeading,
    Placement,
    ScriptDraft,
    Subplot,
    TopPlot,
)

FIRST_NAMES = ["Mara", "Elias", "Nora", "Tobias", "Ines", "Felix", "Greta", "Jonah", "Lena", "Victor",
               "Alma", "Caleb", "Rosa", "Hugo", "Iris", "Dmitri"]
LAST_NAMES = ["Quill", "Hartman", "Okafor", "Lindqvist", "Moreau", "Castillo", "Brandt", "Whitlock",
              "Nakamura", "Ferreira", "Osei", "Kowalski"]
TRAITS = ["stubborn and loyal", "quietly ambitious", "funny but guarded", "haunted by an old mistake",
          "fiercely curious", "kind to a fault", "cynical yet brave", "meticulous and proud"]
PLACES = ["the old harbor", "a cramped apartment", "the city archive", "a roadside diner",
          "the research station", "a rooftop garden", "the train depot", "a candle-lit chapel"]
VERBS = ["confronts", "questions", "comforts", "warns", "follows", "bargains with", "hides from", "thanks"]
LINES = ["We don't have much time.", "You knew this would happen.", "Tell me the truth, just once.",
         "I'm not leaving without you.", "Then we do it my way.", "Look at me. We can still fix this.",
         "Nobody else is coming.", "I should have listened."]
MOODS = ["quietly", "sharply", "with a crooked smile", "barely holding back tears", "firmly", "nervously"]
GENRE_SEEDS = {
    "Romance": "a ferry pilot falls for the rival who is buying the harbor she grew up in",
    "Science Fiction": "an engineer on a failing orbital farm discovers the station's AI has been rationing hope",
    "Horror": "a night nurse notices patients whispering the same name before they vanish",
    "Drama": "three estranged siblings return to settle their late father's vineyard debts",
    "Crime": "a retired forger is pulled into one last job to clear her son's name",
    "Comedy": "a shy magician accidentally becomes the mayor of a small seaside town",
}


def _last(pattern: str, text: str, default: str = "") -> str:
    found = re.findall(pattern, text, flags=re.S)
    return found[-1].strip() if found else default


def _names_in(text: str) -> list[str]:
    return [n.strip() for n in text.split(",") if n.strip()]


class DemoModel:
    """Deterministic backend answering every prompt type of the pipeline.

    ``judge`` selects the evaluation policy: ``"hash"`` (pseudo-random from
    the request), ``"first"`` / ``"second"`` (position-biased) or ``"tie"``.
    ``advice_rounds`` is how many times the Editor gives real advice before
    answering None.
    """

    def __init__(self, seed: int = 0, *, judge: str = "hash", top_plots: int = 2,
                 subplots_per_top: int = 2, advice_rounds: int = 1, events_per_draft: int = 4):
        if judge not in ("hash", "first", "second", "tie"):
            raise ValueError(f"unknown judge policy {judge!r}")
        self.seed = seed
        self.judge = judge
        self.top_plots = top_plots
        self.subplots_per_top = subplots_per_top
        self.advice_rounds = advice_rounds
        self.events_per_draft = events_per_draft
        self.calls = 0

    def _rng(self, req: ChatRequest) -> random.Random:
        h = hashlib.sha256(f"{self.seed}:{req.digest()}".encode()).hexdigest()
        return random.Random(int(h[:16], 16))

    def complete(self, req: ChatRequest) -> str:
        self.calls += 1
        rng = self._rng(req)
        system, user = req.system, req.last_user
        revisions = sum(1 for t in req.turns if t.role == "assistant")
        if system == prompts.CHAR_GEN_SYSTEM:
            return self._characters(req.turns[0].content, revisions)
        if system == prompts.OUT_GEN_SYSTEM:
            return self._outline(req.turns[0].content, revisions)
        if system in (prompts.ADVICE_CHAR_SYSTEM, prompts.ADVICE_OUT_SYSTEM):
            return self._advice(revisions, rng)
        if system == prompts.EXPAND_SYSTEM:
            return self._chapter(user, rng)
        if system == prompts.DRAFT_SYSTEM:
            return self._draft(user, rng)
        if system.startswith(prompts.ACT_SYSTEM.split("<role_name>")[0]):
            return self._perform(system, user, rng)
        if system == prompts.DIRECT_SYSTEM:
            return self._direct(user, rng)
        if system == prompts.PTW_SYSTEM:
            return self._ptw(user, rng)
        if system.startswith(prompts.EVAL_SYSTEM.split("<preliminary_storyline>")[0]):
            return self._verdict(rng)
        if system == prompts.SYNTH_SYSTEM:
            return self._storyline(user, rng)
        return "I am not sure what you are asking for."

    # -- Stage 1 ----------------------------------------------------------

    def _cast(self, storyline: str) -> CharacterSet:
        h = int(hashlib.sha256(f"{self.seed}:{storyline}".encode()).hexdigest()[:16], 16)
        rng = random.Random(h)
        firsts = rng.sample(FIRST_NAMES, 4)
        lasts = rng.sample(LAST_NAMES, 4)
        traits = rng.sample(TRAITS, 4)
        ages = [rng.randint(19, 68) for _ in range(4)]
        roles = ["the protagonist", "the protagonist's closest ally", "the antagonist", "a wary outsider"]
        return CharacterSet(tuple(
            Character(f"{f} {l}", f"{f}, {a}, is {role}; {t}.")
            for f, l, t, a, role in zip(firsts, lasts, traits, ages, roles)
        ))

    def _storyline_of(self, first_user: str) -> str:
        return _last(r"Storyline:\n(.*?)\n(?:\nThe characters|Characters:)", first_user, first_user[:200])

    def _characters(self, first_user: str, revisions: int) -> str:
        cast = self._cast(self._storyline_of(first_user))
        if revisions:
            cast = CharacterSet(tuple(
                Character(c.full_name, f"{c.introduction} Revision {revisions} sharpens their motive.")
                for c in cast
            ))
        return codec.render_characters(cast)

    def _outline(self, first_user: str, revisions: int) -> str:
        storyline = self._storyline_of(first_user)
        names = re.findall(r"<full_name>(.*?)</full_name>", first_user) or list(self._cast(storyline).names)
        h = int(hashlib.sha256(f"{self.seed}:outline:{storyline}".encode()).hexdigest()[:16], 16)
        rng = random.Random(h)
        tops = []
        n = len(names)
        for t in range(1, self.top_plots + 1):
            subs = []
            for s in range(self.subplots_per_top):
                a = names[(t + s - 1) % n]
                b = names[(t + s) % n]
                place = rng.choice(PLACES)
                text = f"{a} {rng.choice(VERBS)} {b} at {place}, and the stakes rise"
                if revisions:
                    text += f" after revision {revisions}"
                subs.append(Subplot(PlotLabel(t, chr(ord("a") + s)), text + ".", place.capitalize(), (a, b)))
            involved = tuple(dict.fromkeys(c for s in subs for c in s.involved_characters))
            top_text = f"Act {t}: " + "; ".join(s.plot_text.rstrip(".") for s in subs) + "."
            tops.append(TopPlot(PlotLabel(t), top_text, "", involved, tuple(subs)))
        return codec.render_outline(Outline(tuple(tops)))

    def _advice(self, revisions: int, rng: random.Random) -> str:
        if revisions >= self.advice_rounds:
            return "<advice>None</advice>\n"
        focus = rng.choice(["motivation", "conflict", "pacing", "the ending", "relationships"])
        return f"<advice>\nGive more weight to {focus}; make each step follow from the last.\n</advice>\n"

    # -- Stage 2 -------------------------------------------------------------

    def _chapter(self, user: str, rng: random.Random) -> str:
        plot = _last(r"<plot_point>\n(.*?)\n</plot_point>", user)
        scene = _last(r"<scene>([^<\n]*)</scene>", user)
        names = re.findall(r"^([^:\n]+): ", _last(r"<characters>\n(.*?)\n</characters>", user), flags=re.M)
        who = " and ".join(names) or "Everyone"
        ending = " By nightfall the story reaches its end." if prompts.LAST_PLOT_NOTE in user else ""
        where = scene[0].lower() + scene[1:] if scene else "the same place"
        body = (f"In {where}, {plot or 'things happen.'} "
                f"{who} feel the weight of the moment. {rng.choice(LINES)} someone says, and nothing is the same."
                f"{ending}")
        return f"<chapter>\n{body}\n</chapter>\n"

    # -- Stage 3 ---------------------------------------------------------------

    def _heading(self, scene: str, rng: random.Random) -> SceneHeading:
        loc = scene.rstrip(".") or rng.choice(PLACES).capitalize()
        placement = Placement.EXT if "harbor" in loc or "rooftop" in loc else Placement.INT
        return SceneHeading(placement, loc, rng.choice(["DAY", "NIGHT"]))

    def _events(self, names: list[str], rng: random.Random) -> list[DraftEvent]:
        names = names or ["Someone"]
        events = []
        for i in range(self.events_per_draft):
            a = names[i % len(names)]
            b = names[(i + 1) % len(names)]
            events.append(DraftEvent(a, f"{a} {rng.choice(VERBS)} {b}."))
        return events

    def _draft(self, user: str, rng: random.Random) -> str:
        names = _names_in(_last(r"<involved_characters>\n(.*?)\n</involved_characters>", user))
        heading = self._heading(_last(r"<scene>([^<\n]*)</scene>", user), rng)
        draft = ScriptDraft(PlotLabel(1, "a"), heading, tuple(self._events(names, rng)))
        return codec.render_draft(draft)

    def _performance(self, name: str, guide: str, spoken: bool, rng: random.Random) -> DetailedPerformance:
        if spoken:
            return DetailedPerformance(name, "", f"({rng.choice(MOODS)})", rng.choice(LINES))
        return DetailedPerformance(name, guide.rstrip(".") + ", then pauses.", "", "")

    def _perform(self, system: str, user: str, rng: random.Random) -> str:
        name = _last(r"<role_name>(.*?)</role_name>", system)
        guide = _last(r"<performance_guide>\n(.*?)\n</performance_guide>", user)
        history = _last(r"<act_history>\n(.*?)\n</act_history>", user)
        spoken = history.count("<detailed_performance>") % 2 == 1
        return codec.render_performance(self._performance(name, guide, spoken, rng))

    def _episode_text(self, heading: SceneHeading | None, perfs: list[DetailedPerformance]) -> str:
        ep = Episode(PlotLabel(1, "a"), heading or SceneHeading(Placement.INT, "Somewhere", "DAY"), tuple(perfs))
        text = codec.render_episode(ep)
        if heading is None:
            text = re.sub(r"<scene_heading>.*?</scene_heading>\n", "", text)
        return text

    def _direct(self, user: str, rng: random.Random) -> str:
        draft = _last(r"<script_draft>\n(.*?)\n</script_draft>", user)
        pairs = re.findall(r"<character>(.*?)</character>\n<performance>(.*?)</performance>", draft)
        perfs = [self._performance(n, g, i % 2 == 1, rng) for i, (n, g) in enumerate(pairs)]
        return self._episode_text(None, perfs)

    def _ptw(self, user: str, rng: random.Random) -> str:
        names = _names_in(_last(r"<involved_characters>\n(.*?)\n</involved_characters>", user))
        heading = self._heading(_last(r"<scene>([^<\n]*)</scene>", user), rng)
        perfs = [self._performance(e.character, e.performance_guide, i % 2 == 1, rng)
                 for i, e in enumerate(self._events(names, rng))]
        return self._episode_text(heading, perfs)

    # -- evaluation and synthesis ------------------------------------------------------

    def _verdict(self, rng: random.Random) -> str:
        if self.judge == "first":
            v = "A"
        elif self.judge == "second":
            v = "B"
        elif self.judge == "tie":
            v = "TIE"
        else:
            v = rng.choice(["A", "B", "TIE"])
        return f"<explanation>Screenplay {v if v != 'TIE' else 'A and B'} reads better on this aspect.</explanation>\n<verdict>{v}</verdict>\n"

    def _storyline(self, user: str, rng: random.Random) -> str:
        genre = _last(r"for an? (.*?) film", user, "Drama")
        target = int(_last(r"approximately (\d+) words", user, "120"))
        target = max(20, target + rng.randint(-target // 4, target // 3))
        premise = GENRE_SEEDS.get(genre, GENRE_SEEDS["Drama"])
        hero = f"{rng.choice(FIRST_NAMES)} {rng.choice(LAST_NAMES)}"
        words = f"In this {genre.lower()} story, {hero} learns that {premise}.".split()
        filler = ("Every choice costs something, old loyalties fray, and a secret from the past "
                  "threatens everything that remains.").split()
        while len(words) < target:
            words.extend(filler[: target - len(words)])
        return "<storyline>\n" + " ".join(words) + "\n</storyline>\n"


class FlakyBackend:
    """Wraps a backend and returns an unparseable reply whenever ``should_fail(request)`` is true."""

    GARBAGE = "Sure! Here is what you asked for, without any tags."

    def __init__(self, inner, should_fail: Callable[[ChatRequest], bool]):
        self.inner = inner
        self.should_fail = should_fail
        self.injected = 0

    def complete(self, req: ChatRequest) -> str:
        if self.should_fail(req):
            self.injected += 1
            return self.GARBAGE
        return self.inner.complete(req)


def fail_system(system_prompt: str) -> Callable[[ChatRequest], bool]:
    """Predicate failing every request sent with ``system_prompt``."""
    return lambda req: req.system == system_prompt

