"""Case base for the CBR attacker policy.

A case pairs a problem description (reference robot pose, ball position,
defending goal, teammate and opponent offsets), an applicability scope over
field regions, and a per-robot solution: adapted positions plus ordered
gameplay steps.  Loading hand-coded cases expands each into four via the two
field symmetries.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .field import GOAL_NEG_X, GOAL_POS_X, FieldModel, Region

GOAL_TARGET = "goal"  # symbolic kick target resolved to the attacked goal

XY = tuple[float, float]


@dataclass(frozen=True)
class PlayStep:
    op: str                      # move_to | grab | kick
    target: Optional[XY | str] = None  # kick/move target; "goal" is symbolic

    def to_json(self):
        if self.target is None:
            return {"op": self.op}
        if isinstance(self.target, str):
            return {"op": self.op, "target": self.target}
        return {"op": self.op, "target": [self.target[0], self.target[1]]}

    @classmethod
    def from_json(cls, obj) -> "PlayStep":
        target = obj.get("target")
        if isinstance(target, list):
            target = (float(target[0]), float(target[1]))
        return cls(obj["op"], target)


@dataclass(frozen=True)
class Case:
    name: str
    defending_goal: str                  # yellow | cyan
    reference: tuple[float, float, float]  # (dx, dy) wrt ball, heading
    ball: XY
    teammates: tuple[XY, ...]            # offsets wrt ball
    opponents: tuple[XY, ...]            # offsets wrt ball
    ball_scope: frozenset[Region]
    opp_scope: frozenset[Region]
    plays: tuple[tuple[PlayStep, ...], ...]  # one play list per involved slot
    adapted: tuple[XY, ...]              # adapted position per involved slot

    @property
    def players_involved(self) -> int:
        return len(self.adapted)

    def opponent_positions(self) -> list[XY]:
        return [(self.ball[0] + dx, self.ball[1] + dy) for dx, dy in self.opponents]

    def to_json(self) -> str:
        obj = {
            "name": self.name,
            "defending_goal": self.defending_goal,
            "reference": list(self.reference),
            "ball": list(self.ball),
            "teammates": [list(p) for p in self.teammates],
            "opponents": [list(p) for p in self.opponents],
            "ball_scope": sorted(list(r) for r in self.ball_scope),
            "opp_scope": sorted(list(r) for r in self.opp_scope),
            "plays": [[s.to_json() for s in play] for play in self.plays],
            "adapted": [list(p) for p in self.adapted],
        }
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "Case":
        obj = json.loads(line)
        return cls(
            name=obj["name"],
            defending_goal=obj["defending_goal"],
            reference=tuple(float(v) for v in obj["reference"]),
            ball=tuple(float(v) for v in obj["ball"]),
            teammates=tuple((float(p[0]), float(p[1])) for p in obj["teammates"]),
            opponents=tuple((float(p[0]), float(p[1])) for p in obj["opponents"]),
            ball_scope=frozenset((int(r[0]), int(r[1])) for r in obj["ball_scope"]),
            opp_scope=frozenset((int(r[0]), int(r[1])) for r in obj["opp_scope"]),
            plays=tuple(
                tuple(PlayStep.from_json(s) for s in play) for play in obj["plays"]
            ),
            adapted=tuple((float(p[0]), float(p[1])) for p in obj["adapted"]),
        )


def save_casebase(cases: list[Case], path: str | Path) -> None:
    Path(path).write_text("".join(c.to_json() + "\n" for c in cases), encoding="utf-8")


def load_handcoded(path: str | Path) -> list[Case]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [Case.from_json(line) for line in lines if line.strip()]


# ---------------------------------------------------------------------------
# Symmetry generation
# ---------------------------------------------------------------------------

def _flip_goal(goal: str) -> str:
    return GOAL_NEG_X if goal == GOAL_POS_X else GOAL_POS_X


def _map_target(target, fn):
    if target is None or isinstance(target, str):
        return target
    return fn(target)


def _transform(case: Case, field: FieldModel, point_fn, heading_fn, region_fn, flip_goal: bool,
               suffix: str) -> Case:
    def step_fn(s: PlayStep) -> PlayStep:
        return PlayStep(s.op, _map_target(s.target, point_fn))

    rdx, rdy, rh = case.reference
    # offsets transform like vectors (no translation component in our maps)
    odx, ody = point_fn((rdx, rdy))
    return Case(
        name=f"{case.name}{suffix}",
        defending_goal=_flip_goal(case.defending_goal) if flip_goal else case.defending_goal,
        reference=(odx, ody, heading_fn(rh)),
        ball=point_fn(case.ball),
        teammates=tuple(point_fn(p) for p in case.teammates),
        opponents=tuple(point_fn(p) for p in case.opponents),
        ball_scope=frozenset(region_fn(r) for r in case.ball_scope),
        opp_scope=frozenset(region_fn(r) for r in case.opp_scope),
        plays=tuple(tuple(step_fn(s) for s in play) for play in case.plays),
        adapted=tuple(point_fn(p) for p in case.adapted),
    )


def mirror_long_axis(case: Case, field: FieldModel) -> Case:
    """Reflection across the long (x) axis; the defending goal is unchanged."""
    return _transform(
        case,
        field,
        point_fn=lambda p: (p[0], -p[1]),
        heading_fn=lambda h: -h,
        region_fn=field.mirror_region_long,
        flip_goal=False,
        suffix="~l",
    )


def mirror_midfield(case: Case, field: FieldModel) -> Case:
    """Reflection across midfield; the defending goal flips."""
    return _transform(
        case,
        field,
        point_fn=lambda p: (-p[0], p[1]),
        heading_fn=lambda h: math.pi - h,
        region_fn=field.mirror_region_mid,
        flip_goal=True,
        suffix="~m",
    )


def generate_symmetric_cases(case: Case, field: FieldModel) -> list[Case]:
    """The three mirrored variants (long axis, midfield, both)."""
    long_ = mirror_long_axis(case, field)
    mid = mirror_midfield(case, field)
    both = mirror_long_axis(mid, field)
    return [long_, mid, replace(both, name=f"{case.name}~lm")]


# ---------------------------------------------------------------------------
# Retrieval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSnapshot:
    ball: XY
    robots: tuple[tuple[int, XY], ...]     # own (controllable) robots
    opponents: tuple[tuple[int, XY], ...]  # sorted by id
    defending_goal: str


def harmonic_mean(values: list[float]) -> float:
    if not values:
        return 0.0
    if any(v == 0.0 for v in values):
        return 0.0
    return len(values) / sum(1.0 / v for v in values)


def _position_similarity(a: XY, b: XY, rho: float) -> float:
    d = math.hypot(a[0] - b[0], a[1] - b[1])
    return math.exp(-((d / rho) ** 2))


def similarity(problem: ProblemSnapshot, case: Case, rho: float = 1.0) -> float:
    """Harmonic mean of per-feature similarities over the non-controllable
    features: the ball and each opponent (best correspondence)."""
    sims = [_position_similarity(problem.ball, case.ball, rho)]
    case_opps = case.opponent_positions()
    prob_opps = [xy for _, xy in problem.opponents]
    if case_opps and prob_opps:
        best: Optional[list[float]] = None
        best_total = -math.inf
        for perm in itertools.permutations(range(len(case_opps))):
            if len(perm) < len(prob_opps):
                continue
            s = [
                _position_similarity(prob_opps[i], case_opps[perm[i]], rho)
                for i in range(len(prob_opps))
            ]
            total = sum(s)
            if total > best_total:
                best_total = total
                best = s
        sims.extend(best or [])
    return harmonic_mean(sims)


def adaptation_cost(robot_positions: list[XY], adapted: tuple[XY, ...]) -> tuple[float, tuple[int, ...]]:
    """Minimum summed distance over robot-to-adapted-position assignments.

    Returns (cost, assignment) where assignment[k] is the index into
    `robot_positions` serving adapted slot k.
    """
    best_cost = math.inf
    best: tuple[int, ...] = ()
    for perm in itertools.permutations(range(len(robot_positions)), len(adapted)):
        cost = sum(
            math.hypot(
                robot_positions[perm[k]][0] - adapted[k][0],
                robot_positions[perm[k]][1] - adapted[k][1],
            )
            for k in range(len(adapted))
        )
        if cost < best_cost:
            best_cost = cost
            best = perm
    return best_cost, best


class CaseBase:
    """Indexed case storage: cases are looked up by (defending goal, number
    of opponents), then filtered by scope and ordered by involvement,
    similarity and adaptation cost."""

    def __init__(self, cases: list[Case], field: FieldModel):
        self.field = field
        self.cases = list(cases)
        self._index: dict[tuple[str, int], list[Case]] = {}
        for c in self.cases:
            self._index.setdefault((c.defending_goal, len(c.opponents)), []).append(c)

    @classmethod
    def from_handcoded(cls, cases: list[Case], field: FieldModel) -> "CaseBase":
        expanded: list[Case] = []
        for c in cases:
            expanded.append(c)
            expanded.extend(generate_symmetric_cases(c, field))
        return cls(expanded, field)

    def __len__(self) -> int:
        return len(self.cases)

    def candidates(self, goal: str, n_opponents: int) -> list[Case]:
        return self._index.get((goal, n_opponents), [])

    def in_scope(self, case: Case, problem: ProblemSnapshot) -> bool:
        if self.field.region_of(*problem.ball) not in case.ball_scope:
            return False
        return all(
            self.field.region_of(*xy) in case.opp_scope for _, xy in problem.opponents
        )

    def retrieve(
        self, problem: ProblemSnapshot, rho: float = 1.0
    ) -> Optional[tuple[Case, dict[int, int]]]:
        """Best applicable case and the robot-to-slot assignment, or None.

        Ordering: players involved (desc), similarity (desc), adaptation cost
        (asc), case name (final deterministic tie-break).
        """
        robot_ids = [rid for rid, _ in problem.robots]
        robot_pos = [xy for _, xy in problem.robots]
        best = None
        for case in self.candidates(problem.defending_goal, len(problem.opponents)):
            if case.players_involved > len(robot_ids):
                continue
            if not self.in_scope(case, problem):
                continue
            sim = similarity(problem, case, rho)
            cost, perm = adaptation_cost(robot_pos, case.adapted)
            key = (-case.players_involved, -sim, cost, case.name)
            if best is None or key < best[0]:
                assignment = {robot_ids[perm[k]]: k for k in range(len(perm))}
                best = (key, case, assignment)
        if best is None:
            return None
        return best[1], best[2]


# ---------------------------------------------------------------------------
# The built-in hand-coded case base
# ---------------------------------------------------------------------------

def _cells(x0: float, x1: float, y0: float, y1: float, field: FieldModel) -> frozenset[Region]:
    """Grid cells whose centers fall inside [x0,x1] x [y0,y1]."""
    out = set()
    for col in range(field.grid_cols):
        for row in range(field.grid_rows):
            cx, cy = field.region_center((col, row))
            if x0 <= cx <= x1 and y0 <= cy <= y1:
                out.add((col, row))
    return frozenset(out)


def builtin_cases(field: FieldModel | None = None) -> list[Case]:
    """Twelve hand-coded attacker cases: forward passes from the back and
    middle thirds, cross passes near the box with a shot, and direct shots."""
    field = field or FieldModel()
    defend = GOAL_NEG_X  # attackers defend the -x goal
    opp_scope = _cells(0.0, 3.0, -2.0, 2.0, field)
    cases: list[Case] = []

    def pass_case(name: str, ball: XY, receiver: XY, then: list[PlayStep]) -> Case:
        kicker = (ball[0] - 0.15, ball[1])
        return Case(
            name=name,
            defending_goal=defend,
            reference=(-0.15, 0.0, 0.0),
            ball=ball,
            teammates=((receiver[0] - ball[0], receiver[1] - ball[1]),),
            opponents=((2.3 - ball[0], 0.0 - ball[1]), (1.4 - ball[0], 0.0 - ball[1])),
            ball_scope=_cells(ball[0] - 0.75, ball[0] + 0.75, ball[1] - 0.75, ball[1] + 0.75, field),
            opp_scope=opp_scope,
            plays=(
                (PlayStep("grab"), PlayStep("kick", (receiver[0], receiver[1]))),
                tuple([PlayStep("grab")] + then),
            ),
            adapted=(kicker, receiver),
        )

    def shot_case(name: str, ball: XY, support: XY) -> Case:
        shooter = (ball[0] - 0.15, ball[1])
        return Case(
            name=name,
            defending_goal=defend,
            reference=(-0.15, 0.0, 0.0),
            ball=ball,
            teammates=((support[0] - ball[0], support[1] - ball[1]),),
            opponents=((2.3 - ball[0], 0.0 - ball[1]), (1.4 - ball[0], 0.0 - ball[1])),
            ball_scope=_cells(ball[0] - 0.75, ball[0] + 0.75, ball[1] - 0.75, ball[1] + 0.75, field),
            opp_scope=opp_scope,
            plays=(
                (PlayStep("grab"), PlayStep("kick", GOAL_TARGET)),
                (PlayStep("move_to", support),),
            ),
            adapted=(shooter, support),
        )

    shoot = [PlayStep("kick", GOAL_TARGET)]
    # Back third: move the ball up a lane.
    cases.append(pass_case("advance_back_mid", (-1.5, 0.0), (-0.5, 0.9), []))
    cases.append(pass_case("advance_back_wing", (-1.5, 1.2), (-0.4, 0.4), []))
    # Middle third: another forward leg.
    cases.append(pass_case("advance_mid_center", (-0.5, 0.3), (0.6, 1.0), []))
    cases.append(pass_case("advance_mid_low", (-0.5, -0.9), (0.6, -0.2), []))
    # Entering the final third: pass and shoot first time.
    cases.append(pass_case("feed_front_center", (0.5, 0.2), (1.5, 1.0), shoot))
    cases.append(pass_case("feed_front_low", (0.5, -1.0), (1.5, -0.3), shoot))
    # Near the box: cross to the far side and shoot first time.
    cases.append(pass_case("cross_and_shoot_high", (1.3, 0.9), (1.9, -0.5), shoot))
    cases.append(pass_case("cross_and_shoot_mid", (1.2, 0.1), (1.9, 1.0), shoot))
    # Shots with a rebound partner.
    cases.append(shot_case("shoot_close_center", (1.9, 0.0), (1.5, 0.9)))
    cases.append(shot_case("shoot_close_high", (1.8, 0.8), (1.5, -0.6)))
    # Wing escapes: bring the ball infield while advancing.
    cases.append(pass_case("wing_escape_high", (0.2, 1.6), (1.2, 0.6), shoot))
    cases.append(pass_case("wing_escape_deep", (-1.8, -1.5), (-0.8, -0.5), []))
    return cases


def default_casebase(field: FieldModel | None = None) -> CaseBase:
    field = field or FieldModel()
    return CaseBase.from_handcoded(builtin_cases(field), field)
