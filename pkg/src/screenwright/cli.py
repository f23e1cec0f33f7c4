"""Command-line entry point.

Exit codes: 0 success, 2 a stage failed, 3 configuration problem.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import dataset as ds
from .errors import ConfigError, CoverageGap, EmptyResults, StageFailure, StageOrderError
from .evaluation import failure_rates, format_table, length_stats
from .gateway import FailureLog
from .model import Genre, Storyline
from .pipeline import (
    FAILURES_FILE,
    Mode,
    PipelineConfig,
    Runtime,
    StoryRun,
    demo_path,
    run_dataset,
    run_eval,
    run_pipeline,
)

EXIT_OK = 0
EXIT_STAGE = 2
EXIT_CONFIG = 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file mirroring PipelineConfig")
    p.add_argument("--backend", choices=["live", "record", "replay", "mock"])
    p.add_argument("--cassette", help="cassette file for record/replay (replay defaults to the shipped demo)")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--no-role-play", action="store_true", help="write episodes directly from drafts")
    p.add_argument("--feedback-rounds", type=int, choices=[0, 1, 2])
    p.add_argument("--workers", type=int)
    p.add_argument("--resume", action="store_true", help="reuse partial checkpoints of unfinished stages")
    p.add_argument("--force", action="store_true", help="regenerate stages that are already complete")
    p.add_argument("-v", "--verbose", action="store_true")


def build_config(args) -> PipelineConfig:
    config = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    changes = {}
    if args.backend:
        changes["backend"] = args.backend
    if args.cassette:
        changes["cassette"] = args.cassette
    elif (args.backend or config.backend) == "replay" and not config.cassette:
        changes["cassette"] = str(demo_path("demo_cassette.jsonl"))
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.mode:
        changes["mode"] = Mode(args.mode)
    if args.no_role_play:
        changes["role_play"] = False
    if args.feedback_rounds is not None:
        changes["planning"] = dataclasses.replace(config.planning, max_feedback_rounds=args.feedback_rounds)
    if args.workers:
        changes["workers"] = args.workers
    if not changes:
        return config
    try:
        return config.replace(**changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _storyline(path: Path, genre: str) -> Storyline:
    try:
        return Storyline(Genre.parse(genre), path.read_text(encoding="utf-8").strip())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read storyline {path}: {exc}") from exc


def _story(args, config) -> StoryRun:
    return StoryRun(args.out, Runtime.create(config), resume=args.resume, force=args.force)


def cmd_synth(args, config):
    genres = tuple(Genre.parse(g) for g in args.genres) if args.genres else tuple(Genre)
    synth = ds.SynthConfig(genres, args.per_genre, args.target_words)
    runtime = Runtime.create(config)
    agent = runtime.agents(runtime.gateway("synth"))["writer"]
    data = ds.synthesize_dataset(agent, synth, args.out)
    print(f"{len(data)} storylines written to {args.out}")
    print(ds.format_stats(ds.dataset_stats(data)), end="")


def cmd_plan(args, config):
    story = _story(args, config)
    story.init(_storyline(args.storyline, args.genre))
    story.plan()
    print(f"planning complete: {args.out}")


def cmd_expand(args, config):
    _story(args, config).expand()
    print(f"expansion complete: {args.out}")


def cmd_draft(args, config):
    drafts = _story(args, config).draft()
    print(f"{len(drafts)} script drafts in {args.out}")


def cmd_act(args, config):
    sp = _story(args, config).act()
    print(f"screenplay with {len(sp.episodes)} episodes: {Path(args.out) / 'screenplay.txt'}")


def cmd_run(args, config):
    src = Path(args.storyline)
    if src.is_dir():
        report = run_dataset(ds.load_dataset(src), config, args.out, resume=args.resume, force=args.force)
        print(f"{len(report.succeeded)} succeeded, {len(report.failed)} failed")
        for sid, stage in sorted(report.failed.items()):
            print(f"  {sid}: {stage}")
        if report.failed:
            return EXIT_STAGE
        return EXIT_OK
    sp = run_pipeline(_storyline(src, args.genre), config, args.out, resume=args.resume, force=args.force)
    print(f"screenplay with {len(sp.episodes)} episodes: {Path(args.out) / 'screenplay.txt'}")
    return EXIT_OK


def cmd_eval(args, config):
    rows, results = run_eval(args.x_dir, args.y_dir, config, args.out, x_name=args.x_name, y_name=args.y_name)
    print(format_table(rows, args.x_name, args.y_name), end="")
    print(f"{len(results)} judgments")


def _screenplay_corpus(root: Path):
    for sp in sorted(root.rglob("screenplay.txt")):
        story = sp.parent
        method = story.parent.name
        genre = "unknown"
        state = story / "state.json"
        if state.exists():
            genre = json.loads(state.read_text(encoding="utf-8")).get("genre", genre)
        yield method, genre, sp.read_text(encoding="utf-8")


def cmd_stats(args, config):
    if args.dataset:
        print(ds.format_stats(ds.dataset_stats(ds.load_dataset(args.dataset))), end="")
    if args.screenplays:
        table = length_stats(_screenplay_corpus(Path(args.screenplays).resolve()))
        for (method, genre), avg in table.by_method_genre.items():
            print(f"{method:<20}{genre:<18}{avg:>9.0f}")
        for method, avg in table.by_method.items():
            print(f"{method:<20}{'Avg':<18}{avg:>9.0f}")
    if args.failures:
        log = FailureLog.load(args.failures)
        attempts = {"Stage1_Planning": args.attempts, "Stage2_Expansion": args.attempts,
                    "Stage3_Screenplay": args.attempts}
        for stage, rate in failure_rates(log, attempts).items():
            print(f"{stage:<20}{rate:>6.1f}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="screenwright", description="Storyline to screenplay with LLM agents.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a storyline dataset")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--per-genre", type=int, default=10)
    p.add_argument("--target-words", type=int, default=120)
    p.add_argument("--genres", nargs="*")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plan", help="Stage 1: characters and outline")
    p.add_argument("storyline", type=Path)
    p.add_argument("--out", type=Path, required=True, help="story directory")
    p.add_argument("--genre", default="Drama")
    p.set_defaults(func=cmd_plan)

    for name, func, text in (("expand", cmd_expand, "Stage 2: chapters"),
                             ("draft", cmd_draft, "Stage 3a: script drafts"),
                             ("act", cmd_act, "Stage 3b: episodes and screenplay")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--out", type=Path, required=True, help="story directory")
        p.set_defaults(func=func)

    p = sub.add_parser("run", help="all stages for a storyline file or a dataset directory")
    p.add_argument("storyline", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--genre", default="Drama")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="pairwise judging of two methods' outputs")
    p.add_argument("x_dir", type=Path)
    p.add_argument("y_dir", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--x-name", default="X")
    p.add_argument("--y-name", default="Y")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="dataset, length and failure statistics")
    p.add_argument("--dataset", type=Path)
    p.add_argument("--screenplays", type=Path, help="root holding <method>/<story>/screenplay.txt")
    p.add_argument("--failures", type=Path, help=f"a {FAILURES_FILE} file")
    p.add_argument("--attempts", type=int, default=60, help="runs attempted per stage")
    p.set_defaults(func=cmd_stats)

    for p in sub.choices.values():
        _common(p)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = build_config(args)
        code = args.func(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StageFailure, StageOrderError, CoverageGap, EmptyResults) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
