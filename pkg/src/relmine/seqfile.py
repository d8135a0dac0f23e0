"""Text formats: sequence files and (ranked) pattern TSVs.

Sequence files hold blank-line-separated records; each record starts with a
header comment `% seq <id> class=<label>` followed by one atom per line,
terminated by a dot.  Pattern TSVs serialise each pattern as the comma-joined
atom conjunction, e.g. `getball(A,B),next_a(A,C),pass(C,B,D)`.
"""

from __future__ import annotations

import math
from pathlib import Path

from .logic import Pattern, RelationalSequence, parse_atom, parse_pattern
from .miner import FrequentPattern
from .scoring import RankedPattern
from .vocab import CLASS_LABELS

PATTERN_HEADER = ("pattern", "len", "support_total", "support_cbr", "support_rea")
RANKED_HEADER = PATTERN_HEADER + ("fisher", "class")


def write_sequences(seqs: list[RelationalSequence], path: str | Path) -> None:
    lines: list[str] = []
    for s in seqs:
        lines.append(f"% seq {s.id} class={s.class_label}")
        for a in s.atoms:
            lines.append(f"{a}.")
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def read_sequences(path: str | Path) -> list[RelationalSequence]:
    path = Path(path)
    seqs: list[RelationalSequence] = []
    arities: dict[str, int] = {}
    seq_id: str | None = None
    label = ""
    atoms: list = []

    def flush() -> None:
        nonlocal seq_id, atoms
        if seq_id is not None:
            seqs.append(RelationalSequence(seq_id, label, tuple(atoms)))
        seq_id = None
        atoms = []

    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            flush()
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if len(parts) >= 3 and parts[0] == "seq":
                flush()
                seq_id = parts[1]
                label = ""
                for p in parts[2:]:
                    if p.startswith("class="):
                        label = p[len("class="):]
            continue
        if not line.endswith("."):
            raise ValueError(f"{path}:{lineno}: atom line must end with '.'")
        if seq_id is None:
            raise ValueError(f"{path}:{lineno}: atom outside of a sequence record")
        atom = parse_atom(line[:-1], arities)
        if not atom.is_ground:
            raise ValueError(f"{path}:{lineno}: sequence atoms must be ground")
        atoms.append(atom)
    flush()
    return seqs


def format_fisher(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return f"{value:.8f}"


def write_patterns_tsv(patterns: list[FrequentPattern], path: str | Path) -> None:
    lines = ["\t".join(PATTERN_HEADER)]
    for fp in patterns:
        lines.append(
            "\t".join(
                [
                    str(fp.pattern),
                    str(len(fp.pattern)),
                    str(fp.support_total),
                ]
                + [str(fp.support_per_class.get(c, 0)) for c in CLASS_LABELS]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_patterns_tsv(path: str | Path) -> list[FrequentPattern]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t")[: len(PATTERN_HEADER)] != list(PATTERN_HEADER):
        raise ValueError(f"{path}: not a pattern TSV")
    out: list[FrequentPattern] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        cols = line.split("\t")
        pattern = parse_pattern(cols[0])
        supports = {c: int(cols[3 + i]) for i, c in enumerate(CLASS_LABELS)}
        out.append(
            FrequentPattern(
                pattern=pattern,
                support_total=int(cols[2]),
                support_per_class=supports,
                mean_embeddings_per_class={},
            )
        )
    return out


def write_ranked_tsv(ranked: list[RankedPattern], path: str | Path) -> None:
    lines = ["\t".join(RANKED_HEADER)]
    for r in ranked:
        lines.append(
            "\t".join(
                [
                    str(r.pattern),
                    str(len(r.pattern)),
                    str(r.support_total),
                ]
                + [str(r.support_per_class.get(c, 0)) for c in CLASS_LABELS]
                + [format_fisher(r.fisher), r.attributed_class]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_ranked_tsv(path: str | Path) -> list[tuple[Pattern, float, str]]:
    """Rows of (pattern, fisher, attributed class) from a ranked TSV."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != list(RANKED_HEADER):
        raise ValueError(f"{path}: not a ranked pattern TSV")
    out: list[tuple[Pattern, float, str]] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        cols = line.split("\t")
        fisher = math.inf if cols[5] == "inf" else float(cols[5])
        out.append((parse_pattern(cols[0]), fisher, cols[6]))
    return out
