"""Command line front end.

Subcommands:
  run     play a tournament and write sessions.csv, transcripts and report.md
  report  re-render a finished run in csv, json or markdown
  replay  re-execute a stored transcript and verify it reproduces exactly
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .protocol import load_transcript, run_session, save_transcript, transcripts_equal
from .report import read_sessions_csv, render_markdown, render_report, build_report, write_sessions_csv
from .tournament import (
    desk_config,
    rebuild_session,
    run_tournament,
    tournament_config_from_dict,
)

logger = logging.getLogger(__name__)


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in text.lower()).strip("-")


def _cmd_run(args: argparse.Namespace) -> int:
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = tournament_config_from_dict(json.load(fh))
    else:
        config = desk_config()
    if args.seed is not None:
        config.master_seed = args.seed
    if args.reps is not None:
        config.repetitions = args.reps
    if args.max_rounds is not None:
        config.max_rounds = args.max_rounds

    out_dir = Path(args.out)
    transcripts_dir = out_dir / "transcripts"
    transcripts_dir.mkdir(parents=True, exist_ok=True)

    def keep_transcript(record, transcript):
        name = f"{_slug(record.team)}__{_slug(record.opponent)}__{record.repetition:03d}.json"
        save_transcript(transcript, transcripts_dir / name)

    handler = None if args.no_transcripts else keep_transcript
    records = run_tournament(config, transcript_handler=handler)

    write_sessions_csv(records, out_dir / "sessions.csv")
    (out_dir / "report.md").write_text(render_markdown(build_report(records)), encoding="utf-8")
    agreements = sum(r.agreement for r in records)
    print(
        f"{len(records)} sessions ({agreements} agreements) -> "
        f"{out_dir / 'sessions.csv'}, {out_dir / 'report.md'}"
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    csv_path = Path(args.in_dir) / "sessions.csv"
    if not csv_path.exists():
        print(f"error: {csv_path} not found", file=sys.stderr)
        return 2
    records = read_sessions_csv(csv_path)
    text = render_report(records, args.format)
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    stored = load_transcript(args.transcript)
    team_party, opponent_party, config = rebuild_session(stored.config)
    replayed, outcome = run_session(team_party, opponent_party, config, stored.config)
    if not transcripts_equal(stored, replayed):
        print("MISMATCH: replay diverged from the stored transcript", file=sys.stderr)
        return 1
    status = "agreement" if outcome.agreement else f"failure ({outcome.reason})"
    print(
        f"replay OK: {len(replayed.entries)} actions, {status} "
        f"after {outcome.rounds_used} rounds, joint utility {outcome.joint_utility:.4f}"
    )
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="negoteam",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a tournament")
    p_run.add_argument("--config", help="tournament config JSON (default: built-in experiment)")
    p_run.add_argument("--seed", type=int, help="master seed override")
    p_run.add_argument("--reps", type=int, help="repetitions per pairing override")
    p_run.add_argument("--max-rounds", type=int, help="rounds per session override")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--no-transcripts", action="store_true", help="skip per-session JSON files")
    p_run.set_defaults(func=_cmd_run)

    p_report = sub.add_parser("report", help="render a finished run")
    p_report.add_argument("--in", dest="in_dir", required=True, help="directory with sessions.csv")
    p_report.add_argument("--format", choices=("csv", "json", "markdown"), default="markdown")
    p_report.add_argument("--out", help="write to file instead of stdout")
    p_report.set_defaults(func=_cmd_report)

    p_replay = sub.add_parser("replay", help="verify a stored transcript reproduces")
    p_replay.add_argument("--transcript", required=True, help="transcript JSON file")
    p_replay.set_defaults(func=_cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
