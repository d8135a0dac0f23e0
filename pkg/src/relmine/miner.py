"""Level-wise frequent pattern mining over the theta-subsumption lattice.

Candidates grow by adding one atom at a time under background-knowledge
constraints: every pattern starts with an action atom, descriptive atoms
attach to an existing time variable, and a next_a atom introduces exactly one
fresh time variable on which a later action atom may be placed.  Infrequent
patterns are pruned by the monotonicity of support; equivalent patterns are
collapsed via a renaming-invariant canonical key plus a full theta-subsumption
equivalence test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import vocab
from .logic import (
    Atom,
    Pattern,
    RelationalSequence,
    Term,
    count_embeddings,
    occurs_in,
    theta_subsumes,
)

ROLE_ACTION = "action"
ROLE_DIMENSIONAL = "dimensional"
ROLE_DESCRIPTIVE = "descriptive"
ROLE_FACT = "role_fact"

ARG_TIME = "time"
ARG_PLAYER = "player"
ARG_VALUE = "value"


class UndeclaredPredicateError(ValueError):
    pass


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    arity: int
    role: str
    arg_kinds: tuple[str, ...]


@dataclass
class BackgroundKnowledge:
    """Per-predicate roles, argument modes and the value vocabulary.

    The value vocabulary maps (predicate, argument position) to the constants
    the miner may place there; it is normally collected from the corpus.
    """

    declarations: dict[str, PredicateDecl]
    value_vocabulary: dict[tuple[str, int], tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def default(cls) -> "BackgroundKnowledge":
        decls: dict[str, PredicateDecl] = {}

        def add(name: str, role: str, *kinds: str) -> None:
            decls[name] = PredicateDecl(name, len(kinds), role, kinds)

        for p in vocab.ACTION_PREDICATES:
            if p == vocab.PASS:
                add(p, ROLE_ACTION, ARG_TIME, ARG_PLAYER, ARG_PLAYER)
            else:
                add(p, ROLE_ACTION, ARG_TIME, ARG_PLAYER)
        add(vocab.NEXT, ROLE_DIMENSIONAL, ARG_TIME, ARG_TIME)
        add(vocab.DIRECTION_VIEW, ROLE_DESCRIPTIVE, ARG_TIME, ARG_PLAYER, ARG_VALUE)
        for p in (
            vocab.REL_WITH_BALL,
            vocab.REL_WITH_TEAM,
            vocab.REL_WITH_OPP1,
            vocab.REL_WITH_OPP2,
        ):
            add(p, ROLE_DESCRIPTIVE, ARG_TIME, ARG_PLAYER, ARG_VALUE, ARG_VALUE)
        # Outcome atoms and role facts are kept in sequences but never grown
        # into patterns.
        for p in vocab.OUTCOME_PREDICATES:
            add(p, ROLE_FACT, ARG_TIME)
        for p in vocab.ROLE_PREDICATES:
            add(p, ROLE_FACT, ARG_PLAYER)
        return cls(decls)

    def with_vocabulary_from(self, corpus: Iterable[RelationalSequence]) -> "BackgroundKnowledge":
        values: dict[tuple[str, int], set[str]] = {}
        for seq in corpus:
            for a in seq.atoms:
                decl = self.declarations.get(a.predicate)
                if decl is None:
                    continue
                for i, kind in enumerate(decl.arg_kinds):
                    if kind == ARG_VALUE and a.args[i].is_constant:
                        values.setdefault((a.predicate, i), set()).add(a.args[i].name)
        vocab_map = {k: tuple(sorted(v)) for k, v in values.items()}
        return BackgroundKnowledge(dict(self.declarations), vocab_map)

    def check_corpus(self, corpus: Iterable[RelationalSequence]) -> None:
        for seq in corpus:
            for a in seq.atoms:
                decl = self.declarations.get(a.predicate)
                if decl is None:
                    raise UndeclaredPredicateError(
                        f"predicate {a.predicate!r} in sequence {seq.id!r} is not declared"
                    )
                if decl.arity != a.arity:
                    raise UndeclaredPredicateError(
                        f"predicate {a.predicate!r} has arity {a.arity}, declared {decl.arity}"
                    )

    def predicates_by_role(self, role: str) -> list[str]:
        return sorted(n for n, d in self.declarations.items() if d.role == role)


@dataclass(frozen=True)
class MiningConfig:
    min_support_alpha: float = 0.10
    maxsize: int = 3
    constraints: Optional[BackgroundKnowledge] = None
    target_class: Optional[str] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.min_support_alpha <= 1.0:
            raise ValueError("min_support_alpha must be in (0, 1]")
        if self.maxsize < 1:
            raise ValueError("maxsize must be >= 1")


@dataclass
class FrequentPattern:
    pattern: Pattern
    support_total: int
    support_per_class: dict[str, int]
    mean_embeddings_per_class: dict[str, float]


def support_threshold(alpha: float, n: int) -> int:
    """ceil(alpha * n) with protection against float round-off."""
    return max(1, math.ceil(round(alpha * n, 9)))


# ---------------------------------------------------------------------------
# Canonical keys and equivalence
# ---------------------------------------------------------------------------

def _atom_shape(a: Atom) -> tuple:
    return (a.predicate, tuple(t.name if t.is_constant else None for t in a.args))


def _render(atoms: Iterable[Atom]) -> str:
    names: dict[str, str] = {}
    parts = []
    for a in atoms:
        args = []
        for t in a.args:
            if t.is_constant:
                args.append(t.name)
            else:
                if t.name not in names:
                    names[t.name] = f"?{len(names)}"
                args.append(names[t.name])
        parts.append(f"{a.predicate}({','.join(args)})")
    return ";".join(parts)


def canonical_form(pattern: Pattern) -> str:
    """Deterministic key, invariant under variable renaming.

    Atoms are sorted by a variable-blind shape; within runs of equal shapes
    every ordering is tried and the lexicographically smallest rendering wins,
    so two alpha-equivalent patterns always share a key.
    """
    atoms = sorted(pattern.atoms, key=_atom_shape)
    runs: list[list[Atom]] = []
    for a in atoms:
        if runs and _atom_shape(runs[-1][0]) == _atom_shape(a):
            runs[-1].append(a)
        else:
            runs.append([a])
    if all(len(r) == 1 for r in runs):
        return _render(atoms)
    best: Optional[str] = None
    for arrangement in itertools.product(*(itertools.permutations(r) for r in runs)):
        flat = [a for run in arrangement for a in run]
        key = _render(flat)
        if best is None or key < best:
            best = key
    return best


def is_equivalent(p1: Pattern, p2: Pattern) -> bool:
    """Mutual theta-subsumption, treating the other side's variables as
    skolem constants."""
    return (
        theta_subsumes(p1.atoms, p2.atoms) is not None
        and theta_subsumes(p2.atoms, p1.atoms) is not None
    )


# ---------------------------------------------------------------------------
# Specialisation operator
# ---------------------------------------------------------------------------

_FRESH_NAMES = tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ")


def _fresh_names(used: set[str]) -> Iterable[str]:
    for n in _FRESH_NAMES:
        if n not in used:
            yield n
    i = 1
    while True:
        for n in _FRESH_NAMES:
            cand = f"{n}{i}"
            if cand not in used:
                yield cand
        i += 1


def _var_kinds(pattern: Pattern, bk: BackgroundKnowledge) -> dict[str, str]:
    kinds: dict[str, str] = {}
    for a in pattern.atoms:
        decl = bk.declarations[a.predicate]
        for t, kind in zip(a.args, decl.arg_kinds):
            if t.is_variable:
                kinds.setdefault(t.name, kind)
    return kinds


def _growth_state(pattern: Pattern, bk: BackgroundKnowledge):
    """Time variables split into action-covered / pending, plus link sources."""
    kinds = _var_kinds(pattern, bk)
    time_vars = [v for v in pattern.variables() if kinds.get(v) == ARG_TIME]
    player_vars = [v for v in pattern.variables() if kinds.get(v) == ARG_PLAYER]
    covered: set[str] = set()
    linked_from: set[str] = set()
    for a in pattern.atoms:
        decl = bk.declarations[a.predicate]
        if decl.role == ROLE_ACTION and a.args[0].is_variable:
            covered.add(a.args[0].name)
        if decl.role == ROLE_DIMENSIONAL and a.args[0].is_variable:
            linked_from.add(a.args[0].name)
    pending = [v for v in time_vars if v not in covered]
    return time_vars, player_vars, covered, linked_from, pending


def specialize(
    pattern: Pattern,
    constraints: BackgroundKnowledge,
    vocabulary: Optional[Iterable[str]] = None,
) -> list[Pattern]:
    """All one-atom specialisations allowed by the growth rules.

    The empty pattern yields the single-action seeds.  Children always share a
    variable with the parent (connectivity) and never duplicate an atom.
    """
    bk = constraints
    allowed = set(vocabulary) if vocabulary is not None else None

    def permitted(name: str) -> bool:
        return allowed is None or name in allowed

    children: list[Pattern] = []
    seen: set[tuple[Atom, ...]] = set()

    def emit(new_atom: Atom) -> None:
        if new_atom in pattern.atoms:
            return
        atoms = pattern.atoms + (new_atom,)
        if atoms not in seen:
            seen.add(atoms)
            children.append(Pattern(atoms))

    if not pattern.atoms:
        for pred in bk.predicates_by_role(ROLE_ACTION):
            if not permitted(pred):
                continue
            decl = bk.declarations[pred]
            gen = _fresh_names(set())
            args = tuple(Term(next(gen)) for _ in range(decl.arity))
            emit(Atom(pred, args))
        return children

    time_vars, player_vars, covered, linked_from, pending = _growth_state(pattern, bk)
    used = set(pattern.variables())

    # Action atoms on a pending time variable introduced by next_a.
    for pred in bk.predicates_by_role(ROLE_ACTION):
        if not permitted(pred):
            continue
        decl = bk.declarations[pred]
        n_players = decl.arity - 1
        for tv in pending:
            slot_choices = [list(player_vars) + [None] for _ in range(n_players)]
            for combo in itertools.product(*slot_choices):
                gen = _fresh_names(used)
                args = [Term(tv)]
                for choice in combo:
                    args.append(Term(choice) if choice is not None else Term(next(gen)))
                emit(Atom(pred, tuple(args)))

    # One outgoing next_a per action-covered time variable.
    if permitted(vocab.NEXT) and vocab.NEXT in bk.declarations:
        for tv in time_vars:
            if tv in covered and tv not in linked_from:
                gen = _fresh_names(used)
                emit(Atom(vocab.NEXT, (Term(tv), Term(next(gen)))))

    # Descriptive atoms reuse an existing time variable and an existing
    # player variable; value slots enumerate the corpus vocabulary.
    for pred in bk.predicates_by_role(ROLE_DESCRIPTIVE):
        if not permitted(pred):
            continue
        decl = bk.declarations[pred]
        value_positions = [i for i, k in enumerate(decl.arg_kinds) if k == ARG_VALUE]
        value_choices = [bk.value_vocabulary.get((pred, i), ()) for i in value_positions]
        if any(not c for c in value_choices):
            continue
        for tv in time_vars:
            for pv in player_vars:
                for values in itertools.product(*value_choices):
                    args: list[Term] = []
                    vi = 0
                    for kind in decl.arg_kinds:
                        if kind == ARG_TIME:
                            args.append(Term(tv))
                        elif kind == ARG_PLAYER:
                            args.append(Term(pv))
                        else:
                            args.append(Term(values[vi]))
                            vi += 1
                    emit(Atom(pred, tuple(args)))

    return children


# ---------------------------------------------------------------------------
# The level-wise search
# ---------------------------------------------------------------------------

def _class_split(corpus: list[RelationalSequence]) -> dict[str, list[RelationalSequence]]:
    split: dict[str, list[RelationalSequence]] = {}
    for seq in corpus:
        split.setdefault(seq.class_label, []).append(seq)
    return dict(sorted(split.items()))


def mine(corpus: list[RelationalSequence], config: MiningConfig) -> list[FrequentPattern]:
    """All patterns up to config.maxsize atoms with support at or above
    ceil(alpha * corpus size), deduplicated up to theta-equivalence, with
    per-class statistics.  Support is pooled over both classes unless
    config.target_class restricts it."""
    if not corpus:
        raise ValueError("corpus is empty")
    bk = config.constraints or BackgroundKnowledge.default()
    if not bk.value_vocabulary:
        bk = bk.with_vocabulary_from(corpus)
    bk.check_corpus(corpus)

    split = _class_split(corpus)
    if config.target_class is not None:
        if config.target_class not in split:
            raise ValueError(f"no sequences of class {config.target_class!r}")
        threshold = support_threshold(
            config.min_support_alpha, len(split[config.target_class])
        )
    else:
        threshold = support_threshold(config.min_support_alpha, len(corpus))

    def measured_support(per_class: dict[str, int]) -> int:
        if config.target_class is not None:
            return per_class.get(config.target_class, 0)
        return sum(per_class.values())

    output: list[FrequentPattern] = []
    kept_by_preds: dict[frozenset[str], list[Pattern]] = {}

    frontier: list[Pattern] = []
    candidates = specialize(Pattern(()), bk)
    for size in range(1, config.maxsize + 1):
        scored: list[tuple[Pattern, dict[str, int]]] = []
        level_keys: set[str] = set()
        for cand in candidates:
            key = canonical_form(cand)
            if key in level_keys:
                continue
            level_keys.add(key)
            per_class = {
                label: sum(1 for s in seqs if occurs_in(cand, s))
                for label, seqs in split.items()
            }
            if measured_support(per_class) >= threshold:
                scored.append((cand, per_class))

        frontier = []
        for cand, per_class in scored:
            frontier.append(cand)
            bucket = kept_by_preds.setdefault(cand.predicates(), [])
            if any(is_equivalent(cand, kept) for kept in bucket):
                continue  # redundant for output, still grown from the frontier
            bucket.append(cand)
            output.append(
                FrequentPattern(
                    pattern=cand,
                    support_total=sum(per_class.values()),
                    support_per_class=per_class,
                    mean_embeddings_per_class={},
                )
            )

        if size == config.maxsize or not frontier:
            break
        candidates = []
        next_keys: set[str] = set()
        for parent in frontier:
            for child in specialize(parent, bk):
                key = canonical_form(child)
                if key not in next_keys:
                    next_keys.add(key)
                    candidates.append(child)

    for fp in output:
        fp.mean_embeddings_per_class = {
            label: (
                sum(count_embeddings(fp.pattern, s) for s in seqs) / len(seqs)
                if seqs
                else 0.0
            )
            for label, seqs in split.items()
        }

    output.sort(key=lambda fp: (len(fp.pattern), canonical_form(fp.pattern)))
    return output
