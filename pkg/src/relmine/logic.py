"""First-order core: terms, atoms, substitutions and theta-subsumption.

Terms follow the Datalog restriction (constants and variables only, no
compound terms).  Variables start with an uppercase letter, constants with a
lowercase letter or a digit.  Sequences are ordered lists of ground atoms;
patterns are conjunctions of possibly non-ground atoms matched against
sequences by theta-subsumption (set semantics).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

# Some published pattern listings write the vertical relation values as
# up/down instead of left/right; the parser normalises them.
VERTICAL_SYNONYMS = {"up": "left", "down": "right"}


class AtomSyntaxError(ValueError):
    """Malformed atom text.  `offset` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ArityConflictError(ValueError):
    """A predicate was used with two different arities."""


@dataclass(frozen=True, slots=True)
class Term:
    name: str

    @property
    def is_variable(self) -> bool:
        return self.name[0].isupper()

    @property
    def is_constant(self) -> bool:
        return not self.name[0].isupper()

    def __str__(self) -> str:
        return self.name


def var(name: str) -> Term:
    t = Term(name)
    if not t.is_variable:
        raise ValueError(f"not a variable name: {name!r}")
    return t


def const(name: str) -> Term:
    t = Term(name)
    if not t.is_constant:
        raise ValueError(f"not a constant name: {name!r}")
    return t


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(t.is_constant for t in self.args)

    def variables(self) -> list[str]:
        """Variable names in argument order, without duplicates."""
        seen: list[str] = []
        for t in self.args:
            if t.is_variable and t.name not in seen:
                seen.append(t.name)
        return seen

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(t.name for t in self.args)})"


def atom(predicate: str, *arg_names: str) -> Atom:
    """Convenience constructor from bare name strings."""
    return Atom(predicate, tuple(Term(a) for a in arg_names))


# A substitution maps variable names to terms.  Applying it to a ground
# expression is the identity; unbound variables are preserved.
Substitution = dict[str, Term]


@dataclass(frozen=True, slots=True)
class RelationalSequence:
    """One trial episode: an ordered list of ground atoms plus a class tag."""

    id: str
    class_label: str
    atoms: tuple[Atom, ...]

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def is_ground(self) -> bool:
        return all(a.is_ground for a in self.atoms)

    def constants(self) -> list[str]:
        seen: list[str] = []
        for a in self.atoms:
            for t in a.args:
                if t.is_constant and t.name not in seen:
                    seen.append(t.name)
        return seen


@dataclass(frozen=True, slots=True)
class Pattern:
    """A conjunction of atoms, possibly with variables."""

    atoms: tuple[Atom, ...]

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def length(self) -> int:
        return len(self.atoms)

    def variables(self) -> list[str]:
        seen: list[str] = []
        for a in self.atoms:
            for v in a.variables():
                if v not in seen:
                    seen.append(v)
        return seen

    def predicates(self) -> frozenset[str]:
        return frozenset(a.predicate for a in self.atoms)

    def is_connected(self) -> bool:
        """True iff the variable-sharing graph over the atoms is connected."""
        if len(self.atoms) <= 1:
            return True
        groups = [set(a.variables()) for a in self.atoms]
        reached = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in range(len(groups)):
                if j not in reached and groups[i] & groups[j]:
                    reached.add(j)
                    frontier.append(j)
        return len(reached) == len(groups)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.atoms)


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

def _scan_ident(text: str, pos: int) -> tuple[str, int]:
    start = pos
    n = len(text)
    while pos < n and (text[pos].isalnum() or text[pos] == "_"):
        pos += 1
    if pos == start:
        raise AtomSyntaxError("expected identifier", start)
    ident = text[start:pos]
    if ident[0] == "_":
        raise AtomSyntaxError("identifier may not start with underscore", start)
    return ident, pos


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _scan_atom(text: str, pos: int, arities: Optional[dict[str, int]]) -> tuple[Atom, int]:
    pos = _skip_ws(text, pos)
    pred, pos = _scan_ident(text, pos)
    if pred[0].isupper():
        raise AtomSyntaxError(f"predicate {pred!r} must start lowercase", pos - len(pred))
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != "(":
        raise AtomSyntaxError("expected '('", pos)
    pos += 1
    args: list[Term] = []
    while True:
        pos = _skip_ws(text, pos)
        if pos < len(text) and text[pos] == ")" and not args:
            raise AtomSyntaxError("empty argument list", pos)
        name, pos = _scan_ident(text, pos)
        if name[0].islower() and name in VERTICAL_SYNONYMS:
            name = VERTICAL_SYNONYMS[name]
        args.append(Term(name))
        pos = _skip_ws(text, pos)
        if pos >= len(text):
            raise AtomSyntaxError("unterminated atom", pos)
        if text[pos] == ",":
            pos += 1
            continue
        if text[pos] == ")":
            pos += 1
            break
        raise AtomSyntaxError(f"unexpected character {text[pos]!r}", pos)
    a = Atom(pred, tuple(args))
    if arities is not None:
        known = arities.get(pred)
        if known is not None and known != a.arity:
            raise ArityConflictError(
                f"predicate {pred!r} used with arity {a.arity}, previously {known}"
            )
        arities[pred] = a.arity
    return a, pos


def parse_atom(text: str, arities: Optional[dict[str, int]] = None) -> Atom:
    """Parse `pred(arg,...,arg)`.

    Uppercase-initial arguments become variables, others constants.  When an
    `arities` dict is supplied, predicate arities are checked against (and
    recorded into) it, so a corpus loader can reject arity conflicts.
    """
    a, pos = _scan_atom(text, 0, arities)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise AtomSyntaxError("trailing input after atom", pos)
    return a


def parse_pattern(text: str, arities: Optional[dict[str, int]] = None) -> Pattern:
    """Parse a comma-separated conjunction of atoms, e.g. `p(A,B),q(B)`."""
    atoms: list[Atom] = []
    pos = 0
    while True:
        a, pos = _scan_atom(text, pos, arities)
        atoms.append(a)
        pos = _skip_ws(text, pos)
        if pos == len(text):
            break
        if text[pos] != ",":
            raise AtomSyntaxError(f"unexpected character {text[pos]!r}", pos)
        pos += 1
    return Pattern(tuple(atoms))


def format_atom(a: Atom) -> str:
    return str(a)


def format_pattern(p: Pattern) -> str:
    return str(p)


# ---------------------------------------------------------------------------
# Substitutions and subsumption
# ---------------------------------------------------------------------------

def apply_to_atom(a: Atom, theta: Substitution) -> Atom:
    if not theta:
        return a
    return Atom(
        a.predicate,
        tuple(theta.get(t.name, t) if t.is_variable else t for t in a.args),
    )


def apply_substitution(atoms: list[Atom] | tuple[Atom, ...], theta: Substitution) -> list[Atom]:
    """Apply `theta` to every atom, preserving order and unbound variables."""
    return [apply_to_atom(a, theta) for a in atoms]


def _try_match(general: Atom, specific: Atom, bindings: Substitution) -> Optional[Substitution]:
    """Extend `bindings` so that general . bindings == specific, or None.

    Variables of `specific` are treated as opaque terms (i.e. the specific
    side is read as if skolemised), which is what makes the mutual-subsumption
    equivalence test on non-ground patterns work.
    """
    merged: Optional[Substitution] = None  # lazily copied on first new binding
    for g, s in zip(general.args, specific.args):
        if g.is_constant:
            if g != s:
                return None
            continue
        bound = (merged if merged is not None else bindings).get(g.name)
        if bound is not None:
            if bound != s:
                return None
            continue
        if merged is None:
            merged = dict(bindings)
        merged[g.name] = s
    return merged if merged is not None else bindings


def _index_by_pred(atoms: tuple[Atom, ...] | list[Atom]) -> dict[tuple[str, int], list[Atom]]:
    index: dict[tuple[str, int], list[Atom]] = {}
    for a in atoms:
        index.setdefault((a.predicate, a.arity), []).append(a)
    return index


def iter_subsumptions(
    general: tuple[Atom, ...] | list[Atom],
    specific: tuple[Atom, ...] | list[Atom],
) -> Iterator[Substitution]:
    """Yield every substitution theta with general . theta a subset of specific.

    Complete backtracking search; distinct atom-to-atom mappings that induce
    the same substitution yield it more than once (callers deduplicate).
    """
    index = _index_by_pred(specific)
    general = list(general)

    def extend(i: int, bindings: Substitution) -> Iterator[Substitution]:
        if i == len(general):
            yield dict(bindings)
            return
        a = general[i]
        for cand in index.get((a.predicate, a.arity), ()):
            ext = _try_match(a, cand, bindings)
            if ext is not None:
                yield from extend(i + 1, ext)

    yield from extend(0, {})


def theta_subsumes(
    general: tuple[Atom, ...] | list[Atom],
    specific: tuple[Atom, ...] | list[Atom],
) -> Optional[Substitution]:
    """Witness substitution mapping `general` into a subset of `specific`.

    Returns None when no such substitution exists.  The search is complete.
    """
    return next(iter_subsumptions(general, specific), None)


# ---------------------------------------------------------------------------
# Occurrence, support, embeddings
# ---------------------------------------------------------------------------

def _contiguous_match(pattern: tuple[Atom, ...], window: tuple[Atom, ...]) -> bool:
    bindings: Substitution = {}
    for g, s in zip(pattern, window):
        if g.predicate != s.predicate or g.arity != s.arity:
            return False
        ext = _try_match(g, s, bindings)
        if ext is None:
            return False
        bindings = ext
    return True


def occurs_in(pattern: Pattern, sequence: RelationalSequence, mode: str = "conjunctive") -> bool:
    """Whether `pattern` occurs in `sequence`.

    conjunctive: theta-subsumption of the pattern atoms into the sequence's
    atom set.  Dimensional next_a atoms can only map onto the sequence's own
    next_a facts, so the temporal chaining is respected while descriptive
    atoms may be skipped.

    contiguous: some substitution maps the pattern atoms onto a contiguous
    block of the sequence, in order.
    """
    if not pattern.atoms:
        raise ValueError("pattern must be nonempty")
    if mode == "conjunctive":
        return theta_subsumes(pattern.atoms, sequence.atoms) is not None
    if mode == "contiguous":
        k = len(pattern.atoms)
        seq = sequence.atoms
        for j in range(len(seq) - k + 1):
            if _contiguous_match(pattern.atoms, seq[j : j + k]):
                return True
        return False
    raise ValueError(f"unknown mode {mode!r}")


def support(pattern: Pattern, corpus: list[RelationalSequence]) -> int:
    """Number of corpus sequences containing the pattern (each at most once)."""
    return sum(1 for s in corpus if occurs_in(pattern, s))


def count_embeddings(pattern: Pattern, sequence: RelationalSequence) -> int:
    """Distinct witness substitutions of the pattern into the sequence.

    Counted over the pattern's own variables only, so unused sequence atoms
    never multiply the count.
    """
    if not pattern.atoms:
        raise ValueError("pattern must be nonempty")
    seen: set[frozenset] = set()
    for theta in iter_subsumptions(pattern.atoms, sequence.atoms):
        seen.add(frozenset(theta.items()))
    return len(seen)
