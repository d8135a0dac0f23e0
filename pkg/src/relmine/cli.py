"""Command line pipeline: simulate -> abstract -> mine -> rank -> report.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.  Flag
defaults can be preloaded from a key=value file via --defaults; the
RELMINE_OUT environment variable sets the default output root.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from collections import Counter
from pathlib import Path

from . import abstraction, experiment, miner, scoring, seqfile
from .cases import default_casebase, load_handcoded, CaseBase
from .logic import Pattern, RelationalSequence
from .simulator import SimConfig
from .trial import read_trial_log
from .vocab import ACTION_PREDICATES, CLASS_LABELS, NEXT

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _out_root() -> Path:
    return Path(os.environ.get("RELMINE_OUT", "relmine_out"))


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _runtime_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_RUNTIME


def project_actions(seq: RelationalSequence) -> RelationalSequence:
    """Keep only the action atoms and their next_a links."""
    keep = set(ACTION_PREDICATES) | {NEXT}
    return RelationalSequence(
        seq.id, seq.class_label, tuple(a for a in seq.atoms if a.predicate in keep)
    )


def _load_corpus(path: str, actions_only: bool) -> list[RelationalSequence]:
    seqs = seqfile.read_sequences(path)
    if actions_only:
        seqs = [project_actions(s) for s in seqs]
    return seqs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    if args.trials < 1:
        return _usage_error("--trials must be >= 1")
    scenarios = [1, 2, 3, 4] if args.scenario == "all" else [int(args.scenario)]
    approaches = ["cbr", "rea"] if args.approach == "both" else [args.approach]
    out = Path(args.out) if args.out else _out_root() / "logs"
    base = SimConfig(timeout=args.timeout)
    casebase = None
    if "cbr" in approaches:
        if args.casebase:
            try:
                casebase = CaseBase.from_handcoded(load_handcoded(args.casebase), base.field)
            except OSError as exc:
                return _runtime_error(f"cannot load casebase: {exc}")
        else:
            casebase = default_casebase(base.field)
    try:
        rows = experiment.run_experiment(
            out_dir=out,
            scenarios=scenarios,
            config=args.config,
            approaches=approaches,
            trials_per_cell=args.trials,
            master_seed=args.seed,
            casebase=casebase,
            base_config=base,
        )
    except OSError as exc:
        return _runtime_error(str(exc))
    tallies = Counter(r["outcome"] for r in rows)
    summary = ", ".join(f"{k}={v}" for k, v in sorted(tallies.items()))
    print(f"wrote {len(rows)} trial logs to {out} ({summary})")
    return EXIT_OK


def cmd_abstract(args: argparse.Namespace) -> int:
    logs_dir = Path(args.logs)
    out = Path(args.out) if args.out else _out_root() / "sequences.txt"
    try:
        manifest = experiment.read_manifest(logs_dir)
    except FileNotFoundError as exc:
        return _runtime_error(str(exc))
    if not manifest:
        return _runtime_error(f"empty manifest in {logs_dir}")
    sequences = []
    for row in manifest:
        path = logs_dir / row["path"]
        try:
            log = read_trial_log(path)
        except (OSError, ValueError) as exc:
            return _runtime_error(f"cannot read {path}: {exc}")
        base_id = f"{row['cell']}-{int(row['trial']):04d}"
        sequences.extend(abstraction.abstract_log(log, row["approach"], base_id))
    out.parent.mkdir(parents=True, exist_ok=True)
    seqfile.write_sequences(sequences, out)
    print(f"wrote {len(sequences)} sequences to {out}")
    return EXIT_OK


def _mining_config(args: argparse.Namespace) -> miner.MiningConfig | int:
    if not 0.0 < args.min_support <= 1.0:
        return _usage_error("--min-support must be in (0, 1]")
    if args.maxsize < 1:
        return _usage_error("--maxsize must be >= 1")
    return miner.MiningConfig(min_support_alpha=args.min_support, maxsize=args.maxsize)


def cmd_mine(args: argparse.Namespace) -> int:
    config = _mining_config(args)
    if isinstance(config, int):
        return config
    out = Path(args.out) if args.out else _out_root() / "patterns.tsv"
    try:
        corpus = _load_corpus(args.seqs, args.actions_only)
    except (OSError, ValueError) as exc:
        return _runtime_error(str(exc))
    if not corpus:
        return _runtime_error("no sequences to mine")
    patterns = miner.mine(corpus, config)
    out.parent.mkdir(parents=True, exist_ok=True)
    seqfile.write_patterns_tsv(patterns, out)
    print(f"wrote {len(patterns)} frequent patterns to {out}")
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    config = _mining_config(args)
    if isinstance(config, int):
        return config
    if args.top < 0:
        return _usage_error("--top must be >= 0")
    out = Path(args.out) if args.out else _out_root() / "ranked.tsv"
    try:
        corpus = _load_corpus(args.seqs, args.actions_only)
    except (OSError, ValueError) as exc:
        return _runtime_error(str(exc))
    if not corpus:
        return _runtime_error("no sequences to rank against")
    try:
        if args.patterns:
            patterns = seqfile.read_patterns_tsv(args.patterns)
        else:
            patterns = miner.mine(corpus, config)
    except (OSError, ValueError) as exc:
        return _runtime_error(str(exc))
    ranked = scoring.rank(patterns, corpus, args.top, feature=args.feature)
    out.parent.mkdir(parents=True, exist_ok=True)
    seqfile.write_ranked_tsv(ranked, out)
    print(f"wrote {len(ranked)} ranked patterns to {out}")
    return EXIT_OK


def _scenario_of(seq_id: str) -> str:
    return seq_id.split("-", 1)[0] if "-" in seq_id else "all"


def cmd_report(args: argparse.Namespace) -> int:
    out_dir = Path(args.out) if args.out else _out_root() / "report"
    try:
        corpus = seqfile.read_sequences(args.seqs)
        ranked = seqfile.read_ranked_tsv(args.ranked)
    except (OSError, ValueError) as exc:
        return _runtime_error(str(exc))
    out_dir.mkdir(parents=True, exist_ok=True)

    # (a) per-scenario action counts in the standard row layout
    by_scenario: dict[str, list[RelationalSequence]] = {}
    for s in corpus:
        by_scenario.setdefault(_scenario_of(s.id), []).append(s)
    counts_path = out_dir / "action_counts.csv"
    with counts_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["scenario", "class", "n_sequences"] + list(ACTION_PREDICATES) + ["total_actions"]
        )
        for scenario in sorted(by_scenario):
            table = scoring.action_distribution(by_scenario[scenario])
            for label, row in table.items():
                writer.writerow(
                    [scenario, label, row["n_sequences"]]
                    + [row[p] for p in ACTION_PREDICATES]
                    + [row["total_actions"]]
                )

    # (b) percentage distribution for plotting
    pct = scoring.action_distribution_pct(corpus)
    pct_path = out_dir / "action_distribution_pct.csv"
    with pct_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        labels = sorted(pct) or list(CLASS_LABELS)
        writer.writerow(["action"] + labels)
        for p in ACTION_PREDICATES:
            writer.writerow([p] + [f"{pct.get(c, {}).get(p, 0.0):.2f}" for c in labels])

    # (c) top ranked patterns
    top_path = out_dir / "top_patterns.tsv"
    with top_path.open("w", encoding="utf-8") as fh:
        fh.write("pattern\tfisher\tteam\n")
        for pattern, fisher, team in ranked[: args.top]:
            fh.write(f"{pattern}\t{seqfile.format_fisher(fisher)}\t{team}\n")

    print(f"wrote report to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relmine",
        description="simulate robot-soccer trials, abstract them into relational "
        "sequences, mine frequent patterns and rank them by Fisher score",
    )
    parser.add_argument(
        "--defaults", metavar="FILE", help="key=value file with flag defaults"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run seeded trials and write logs + manifest")
    p.add_argument("--scenario", choices=["1", "2", "3", "4", "all"], default="all")
    p.add_argument("--config", choices=["dg", "2d"], default="dg")
    p.add_argument("--approach", choices=["cbr", "rea", "both"], default="both")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--casebase", help="JSONL file of hand-coded cases")
    p.add_argument("--out", help="output directory for logs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("abstract", help="turn trial logs into relational sequences")
    p.add_argument("--logs", required=True, help="directory with logs + manifest.csv")
    p.add_argument("--out", help="output sequence file")
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("mine", help="mine frequent relational patterns")
    p.add_argument("--seqs", required=True)
    p.add_argument("--min-support", type=float, default=0.10)
    p.add_argument("--maxsize", type=int, default=3)
    p.add_argument("--actions-only", action="store_true",
                   help="project sequences onto action atoms and next_a links")
    p.add_argument("--out", help="output pattern TSV")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("rank", help="rank patterns by Fisher score")
    p.add_argument("--seqs", required=True)
    p.add_argument("--min-support", type=float, default=0.10)
    p.add_argument("--maxsize", type=int, default=3)
    p.add_argument("--actions-only", action="store_true")
    p.add_argument("--patterns", help="reuse a mined pattern TSV instead of re-mining")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--feature", choices=["embeddings", "binary"], default="embeddings")
    p.add_argument("--out", help="output ranked TSV")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("report", help="write distribution tables and top patterns")
    p.add_argument("--seqs", required=True)
    p.add_argument("--ranked", required=True)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--out", help="report directory")
    p.set_defaults(func=cmd_report)

    return parser


def _apply_defaults_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Pre-scan for --defaults and fold its key=value pairs in as defaults."""
    if "--defaults" not in argv:
        return argv
    i = argv.index("--defaults")
    if i + 1 >= len(argv):
        raise ValueError("--defaults needs a file argument")
    path = Path(argv[i + 1])
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        values[k.strip().replace("-", "_")] = v.strip()
    for action in parser._subparsers._group_actions:  # noqa: SLF001 - argparse has no public hook
        for sp in action.choices.values():
            known = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in values.items() if k in known})
    return argv[:i] + argv[i + 2 :]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_defaults_file(parser, argv)
    except (OSError, ValueError) as exc:
        return _usage_error(str(exc))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
