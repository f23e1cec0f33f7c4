"""Pairwise judging of two methods' screenplays, plus the reporting around it.

Screenplays are cut into one segment per top-level plot and segments are
paired by label. Each (pair, dimension) gets one judge call with the
presentation order picked by a seeded hash, and verdicts are mapped back to
the methods before counting.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import logging
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import codec, prompts, tags
from .errors import CoverageGap, EmptyResults, MalformedVerdict, StructuredOutputFailure
from .gateway import Agent, FailureLog, Stage
from .model import CharacterSet, Outline, PlotLabel, Screenplay, Storyline, word_count

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.05
TEST_NOTE = "p: exact binomial sign test, ties excluded, H0 p=0.5 (assumed test)"


class Dimension(enum.Enum):
    COHERENCE = "Coherence"
    RELEVANCE = "Relevance"
    INTERESTINGNESS = "Interestingness"
    OVERALL = "Overall"

    @property
    def focus(self) -> str:
        return prompts.EVAL_FOCUS[self.value]


class Verdict(enum.Enum):
    A = "A"
    B = "B"
    TIE = "TIE"


class Order(enum.Enum):
    XY = "XY"
    YX = "YX"

    def flip(self) -> Order:
        return Order.YX if self is Order.XY else Order.XY


class Canonical(enum.Enum):
    X = "MethodX"
    Y = "MethodY"
    TIE = "TIE"


def canonicalize(order: Order, verdict: Verdict) -> Canonical:
    if verdict is Verdict.TIE:
        return Canonical.TIE
    first_wins = verdict is Verdict.A
    x_first = order is Order.XY
    return Canonical.X if first_wins == x_first else Canonical.Y


def flip_verdict(v: Verdict) -> Verdict:
    return {Verdict.A: Verdict.B, Verdict.B: Verdict.A, Verdict.TIE: Verdict.TIE}[v]


# -- segments and pairs -------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    top_plot_label: PlotLabel
    text: str

    @property
    def words(self) -> int:
        return word_count(self.text)


def segment_by_top_plot(screenplay: Screenplay, outline: Outline) -> list[Segment]:
    by_label = {e.subplot_label: e for e in screenplay.episodes}
    segments = []
    for top in outline.top_plots:
        eps = []
        for sub in top.subplots:
            if sub.label not in by_label:
                raise CoverageGap(f"no episode for {sub.label}")
            eps.append(by_label[sub.label])
        segments.append(Segment(top.label, "\n\n".join(codec.render_episode_text(e) for e in eps)))
    return segments


@dataclass(frozen=True)
class Pair:
    pair_id: str
    x: Segment
    y: Segment


def form_pairs(story_id: str, segments_x: Sequence[Segment], segments_y: Sequence[Segment]) -> list[Pair]:
    """Align segments by top-plot label; segments without a partner are dropped."""
    ys = {s.top_plot_label: s for s in segments_y}
    pairs = []
    for sx in segments_x:
        sy = ys.pop(sx.top_plot_label, None)
        if sy is None:
            logger.info("%s: %s only in method X, dropped", story_id, sx.top_plot_label)
            continue
        pairs.append(Pair(f"{story_id}:{sx.top_plot_label}", sx, sy))
    for label in ys:
        logger.info("%s: %s only in method Y, dropped", story_id, label)
    return pairs


@dataclass(frozen=True)
class SharedContext:
    storyline: str
    characters: str
    summary: str


def shared_context(storyline: Storyline, characters: CharacterSet, outline: Outline) -> SharedContext:
    # the judge's story summary is the list of top-level plot texts
    summary = "\n".join(f"{t.label}: {t.plot_text}" for t in outline.top_plots)
    return SharedContext(storyline.text, codec.render_characters_inner(characters), summary)


# -- judging ---------------------------------------------------------------------------

def presented_order(seed: int, pair_id: str, dimension: Dimension) -> Order:
    h = hashlib.sha256(f"{seed}\x1f{pair_id}\x1f{dimension.value}".encode()).digest()
    return Order.XY if h[0] & 1 == 0 else Order.YX


def parse_verdict(doc: tags.TagDocument) -> tuple[Verdict, str]:
    body = doc.root("verdict").text
    try:
        verdict = Verdict(body)
    except ValueError:
        raise MalformedVerdict(f"verdict body {body!r} is not A, B or TIE") from None
    return verdict, doc.root("explanation").text


def judge_request(judge: Agent, ctx: SharedContext, dimension: Dimension, a: str, b: str):
    system = prompts.fill(prompts.EVAL_SYSTEM, storyline=ctx.storyline, characters=ctx.characters,
                          summary=ctx.summary, focus=dimension.focus)
    return judge.request(system, prompts.fill(prompts.EVAL_USER, a=a, b=b))


@dataclass(frozen=True)
class PairResult:
    pair_id: str
    dimension: Dimension
    presented_order: Order
    verdict_raw: Verdict
    verdict_canonical: Canonical
    explanation: str
    judge_model: str

    def to_json(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "dimension": self.dimension.value,
            "order": self.presented_order.value,
            "verdict_raw": self.verdict_raw.value,
            "verdict_canonical": self.verdict_canonical.value,
            "explanation": self.explanation,
            "judge_model": self.judge_model,
        }


def judge_pair(judge: Agent, pair: Pair, dimension: Dimension, ctx: SharedContext, seed: int,
               story_id: str = "") -> PairResult | None:
    """One judge call (plus one retry on a malformed verdict).

    Returns None when both attempts fail; the pair then drops out of ``n``
    for this dimension rather than counting as a tie.
    """
    order = presented_order(seed, pair.pair_id, dimension)
    a, b = (pair.x, pair.y) if order is Order.XY else (pair.y, pair.x)
    req = judge_request(judge, ctx, dimension, a.text, b.text)
    try:
        verdict, explanation = judge.gateway.complete_structured(
            req, tags.VERDICT, max_retries=1, stage=Stage.EVAL, validate=parse_verdict)
    except StructuredOutputFailure as exc:
        logger.warning("judge failure on %s/%s excluded: %s", pair.pair_id, dimension.value, exc.last_error)
        judge.gateway.failure_log.stage_failed(Stage.EVAL, story_id or pair.pair_id)
        return None
    return PairResult(pair.pair_id, dimension, order, verdict, canonicalize(order, verdict),
                      explanation, judge.params.model_id)


def judge_all(judge: Agent, jobs: Iterable[tuple[Pair, SharedContext]], seed: int,
              dimensions: Sequence[Dimension] = tuple(Dimension), workers: int = 1) -> list[PairResult]:
    """Judge every pair on every dimension. Output order is the input order."""
    tasks = [(p, d, c) for p, c in jobs for d in dimensions]

    def run(t):
        p, d, c = t
        return judge_pair(judge, p, d, c, seed)

    if workers <= 1:
        out = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(run, tasks))
    return [r for r in out if r is not None]


# -- aggregation ---------------------------------------------------------------------------

def round_half_up(value: Fraction | float, places: int = 1) -> float:
    q = Decimal(1).scaleb(-places)
    if isinstance(value, Fraction):
        d = Decimal(value.numerator) / Decimal(value.denominator)
    else:
        d = Decimal(str(value))
    return float(d.quantize(q, rounding=ROUND_HALF_UP))


def percent(count: int, n: int) -> float:
    return round_half_up(Fraction(100 * count, n))


def sign_test(x_wins: int, y_wins: int, alternative: str = "two-sided") -> float:
    """Exact binomial sign test with ties already removed, H0: p = 1/2.

    ``alternative`` is "two-sided", "greater" (X wins more often) or "less".
    With no decisive pairs the p-value is 1.0.
    """
    n = x_wins + y_wins
    if n == 0:
        return 1.0
    denom = 2 ** n

    def upper(k):  # P(X >= k)
        return Fraction(sum(math.comb(n, i) for i in range(k, n + 1)), denom)

    if alternative == "greater":
        p = upper(x_wins)
    elif alternative == "less":
        p = upper(y_wins)
    elif alternative == "two-sided":
        p = min(Fraction(1), 2 * upper(max(x_wins, y_wins)))
    else:
        raise ValueError(f"unknown alternative {alternative!r}")
    return float(p)


@dataclass(frozen=True)
class WinRateRow:
    dimension: str
    x_wins: int
    y_wins: int
    ties: int
    x_win_pct: float
    y_win_pct: float
    tie_pct: float
    p_value: float
    n_pairs: int
    zero_information: bool = False

    @property
    def significant(self) -> bool:
        return not self.zero_information and self.p_value < SIGNIFICANCE

    @property
    def winner(self) -> str | None:
        if not self.significant:
            return None
        return "X" if self.x_wins > self.y_wins else "Y"


def row_from_counts(dimension: str, x: int, y: int, ties: int, alternative: str = "two-sided") -> WinRateRow:
    n = x + y + ties
    if n == 0:
        raise EmptyResults(f"no results for {dimension}")
    return WinRateRow(dimension, x, y, ties, percent(x, n), percent(y, n), percent(ties, n),
                      sign_test(x, y, alternative), n, zero_information=(x + y == 0))


def aggregate(results: Iterable[PairResult], dimension: Dimension, alternative: str = "two-sided") -> WinRateRow:
    counts = Counter(r.verdict_canonical for r in results if r.dimension is dimension)
    return row_from_counts(dimension.value, counts[Canonical.X], counts[Canonical.Y],
                           counts[Canonical.TIE], alternative)


def aggregate_all(results: Sequence[PairResult], alternative: str = "two-sided") -> list[WinRateRow]:
    present = {r.dimension for r in results}
    return [aggregate(results, d, alternative) for d in Dimension if d in present]


def reconstruct_counts(x_pct: float, y_pct: float, tie_pct: float, n: int) -> list[tuple[int, int, int]]:
    """All integer (x, y, ties) summing to ``n`` whose rounded percentages match."""
    target = (round_half_up(x_pct), round_half_up(y_pct), round_half_up(tie_pct))
    out = []
    for x in range(n + 1):
        if percent(x, n) != target[0]:
            continue
        for y in range(n - x + 1):
            if percent(y, n) == target[1] and percent(n - x - y, n) == target[2]:
                out.append((x, y, n - x - y))
    return out


# -- reports -------------------------------------------------------------------------------

def format_table(rows: Sequence[WinRateRow], x_name: str = "X", y_name: str = "Y") -> str:
    """Plain-text table; ``*`` marks the significant winner."""
    head = f"{'Dimension':<16}{x_name + ' wins':>16}{y_name + ' wins':>16}{'Tie':>8}{'p':>12}{'n':>6}"
    lines = [head, "-" * len(head)]
    for r in rows:
        xs = f"{r.x_win_pct:.1f}" + ("*" if r.winner == "X" else "")
        ys = f"{r.y_win_pct:.1f}" + ("*" if r.winner == "Y" else "")
        p = "n/a" if r.zero_information else f"{r.p_value:.3g}"
        lines.append(f"{r.dimension:<16}{xs:>16}{ys:>16}{r.tie_pct:>8.1f}{p:>12}{r.n_pairs:>6}")
    lines.append(TEST_NOTE)
    return "\n".join(lines) + "\n"


def rows_csv(rows: Sequence[WinRateRow]) -> str:
    buf = io.StringIO()
    fields = ["dimension", "x_wins", "y_wins", "ties", "x_win_pct", "y_win_pct", "tie_pct",
              "p_value", "n_pairs", "zero_information", "significant"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({**asdict(r), "significant": r.significant})
    return buf.getvalue()


def write_reports(out_dir: Path | str, results: Sequence[PairResult], rows: Sequence[WinRateRow],
                  x_name: str = "X", y_name: str = "Y") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for r in results:
            fh.write(json.dumps(r.to_json(), ensure_ascii=False) + "\n")
    (out / "summary.txt").write_text(format_table(rows, x_name, y_name), encoding="utf-8")
    (out / "summary.csv").write_text(rows_csv(rows), encoding="utf-8")


# -- length and failure statistics ------------------------------------------------------------

@dataclass(frozen=True)
class LengthTable:
    by_method_genre: dict[tuple[str, str], float]
    by_method: dict[str, float]
    overall: float


def length_stats(corpus: Iterable[tuple[str, str, str]]) -> LengthTable:
    """Average word counts from ``(method, genre, screenplay_text)`` triples.

    Per-method averages are size-weighted over all of that method's
    screenplays, which equals the mean of genre averages when genres are
    balanced.
    """
    groups: dict[tuple[str, str], list[int]] = defaultdict(list)
    for method, genre, text in corpus:
        groups[(method, genre)].append(word_count(text))
    if not groups:
        raise EmptyResults("empty corpus")
    per_method: dict[str, list[int]] = defaultdict(list)
    for (method, _), counts in groups.items():
        per_method[method].extend(counts)
    everything = [c for cs in groups.values() for c in cs]
    return LengthTable(
        {k: sum(v) / len(v) for k, v in sorted(groups.items())},
        {k: sum(v) / len(v) for k, v in sorted(per_method.items())},
        sum(everything) / len(everything),
    )


def failure_rates(log: FailureLog, attempts: Mapping[str, int]) -> dict[str, float]:
    """Percentage of attempted runs in which each stage gave up."""
    failed = Counter(stage for stage, _ in log.stage_failures)
    out = {}
    for stage, n in attempts.items():
        key = str(getattr(stage, "value", stage))
        f = failed.get(key, 0)
        if n < f:
            raise ValueError(f"{key}: {f} failures but only {n} attempts")
        out[key] = percent(f, n) if n else 0.0
    return out
