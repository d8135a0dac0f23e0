"""Deterministic seeded 2 vs 2 soccer simulator.

One trial is a fixed-timestep episode from a scenario start state.  The
attacking pair runs either the reactive policy or the case-based policy with
its coordination state machine; the opponents follow home-region rules (DG:
defender plus goalie, 2D: two defenders with overlapping regions).  Kicks are
noisy, grabs can fail and the ball decelerates with friction.  A trial ends
when the ball leaves the field or the clock runs out; a goalie block is a
mid-trial boundary after which the goalie clears and play continues.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .cases import GOAL_TARGET, Case, CaseBase, ProblemSnapshot
from .field import GOAL_NEG_X, FieldModel
from .trial import BallState, Frame, RobotState, TrialLog
from .vocab import TEAM_ATTACK, TEAM_DEFEND

DG = "dg"
TWO_D = "2d"


@dataclass(frozen=True)
class SimConfig:
    scenario: int = 1
    opponent_config: str = DG
    approach: str = "rea"            # rea | cbr
    seed: int = 0
    timeout: float = 60.0
    dt: float = 0.05
    # action noise
    kick_noise_deg: float = 10.0     # uniform +/- spread on kick bearing
    kick_speed_spread: float = 0.1   # uniform +/- relative spread on kick speed
    grab_failure: float = 0.2
    # kinematics
    friction: float = 0.5            # ball deceleration, m/s^2
    max_speed: float = 0.3
    defender_speed: float = 0.24     # defenders trail the attackers slightly
    kick_speed: float = 1.5
    grab_radius: float = 0.2
    max_grab_speed: float = 1.1      # faster balls cannot be grabbed
    challenge_radius: float = 0.4
    steal_radius: float = 0.2
    steal_prob: float = 0.03         # per tick while in steal range
    grab_cooldown: float = 0.5       # after kicking or losing the ball
    hold_limit: float = 3.0          # reactive holder kicks by this hold time
    shoot_range: float = 1.8
    smash_power: float = 1.25        # reactive shots are hit harder than placed kicks
    clear_power: float = 1.3         # defensive clearances travel far upfield
    pos_tol: float = 0.18
    carry_offset: float = 0.12       # ball carried this far ahead of the holder
    positioning_timeout: float = 8.0
    field: FieldModel = field(default_factory=FieldModel)

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not 0.0 <= self.grab_failure <= 1.0:
            raise ValueError("grab_failure must be in [0, 1]")
        if self.scenario not in (1, 2, 3, 4):
            raise ValueError("scenario must be 1..4")
        if self.opponent_config not in (DG, TWO_D):
            raise ValueError("opponent_config must be 'dg' or '2d'")
        if self.approach not in ("rea", "cbr"):
            raise ValueError("approach must be 'rea' or 'cbr'")


@dataclass
class RobotSim:
    id: int
    team: str
    role: str  # striker | support | goalie | defender | mid_defender
    x: float
    y: float
    heading: float


@dataclass(frozen=True)
class Intent:
    move: Optional[tuple[float, float]] = None
    face: Optional[tuple[float, float]] = None
    kick: Optional[tuple[float, float]] = None
    kick_power: float = 1.0
    grab: bool = False

IDLE = Intent()


@dataclass
class World:
    cfg: SimConfig
    rng: random.Random
    robots: list[RobotSim]
    ball_x: float
    ball_y: float
    ball_vx: float = 0.0
    ball_vy: float = 0.0
    possession: Optional[int] = None
    t: float = 0.0
    tick: int = 0
    hold_since: Optional[float] = None
    cooldown_until: dict[int, float] = field(default_factory=dict)

    def robot(self, rid: int) -> RobotSim:
        for r in self.robots:
            if r.id == rid:
                return r
        raise KeyError(rid)

    def attackers(self) -> list[RobotSim]:
        return [r for r in self.robots if r.team == TEAM_ATTACK]

    def defenders(self) -> list[RobotSim]:
        return [r for r in self.robots if r.team == TEAM_DEFEND]

    def dist(self, r: RobotSim, x: float, y: float) -> float:
        return math.hypot(r.x - x, r.y - y)

    def ball_dist(self, r: RobotSim) -> float:
        return self.dist(r, self.ball_x, self.ball_y)


# ---------------------------------------------------------------------------
# Scenario setup
# ---------------------------------------------------------------------------

# scenario -> (ball, attacker1, attacker2); attackers face the attacked goal
SCENARIO_STARTS: dict[int, tuple[tuple[float, float], tuple[float, float], tuple[float, float]]] = {
    1: ((-1.5, 0.0), (-1.8, 0.5), (-1.8, -0.5)),    # middle-back, central
    2: ((-1.5, 1.2), (-1.8, 1.5), (-1.8, 0.3)),     # middle-back, left side
    3: ((0.4, 0.0), (0.1, 0.7), (0.1, -0.7)),       # middle-front, central
    4: ((0.4, -1.0), (0.1, -1.4), (0.1, 0.2)),      # middle-front, offset
}


def make_world(cfg: SimConfig) -> World:
    ball, a1, a2 = SCENARIO_STARTS[cfg.scenario]
    robots = [
        RobotSim(1, TEAM_ATTACK, "striker", a1[0], a1[1], 0.0),
        RobotSim(2, TEAM_ATTACK, "support", a2[0], a2[1], 0.0),
    ]
    if cfg.opponent_config == DG:
        robots.append(RobotSim(3, TEAM_DEFEND, "goalie", 2.7, 0.0, math.pi))
        robots.append(RobotSim(4, TEAM_DEFEND, "defender", 1.4, 0.0, math.pi))
    else:
        robots.append(RobotSim(3, TEAM_DEFEND, "mid_defender", 0.7, 0.0, math.pi))
        robots.append(RobotSim(4, TEAM_DEFEND, "defender", 1.6, 0.0, math.pi))
    return World(
        cfg=cfg,
        rng=random.Random(cfg.seed),
        robots=robots,
        ball_x=ball[0],
        ball_y=ball[1],
    )


# Home regions as (x0, x1, y0, y1); the goalie's is the penalty box.
def home_region(cfg: SimConfig, robot: RobotSim) -> tuple[float, float, float, float]:
    f = cfg.field
    if robot.role == "goalie":
        return (f.box_min_x, f.half_length, -f.penalty_half_width, f.penalty_half_width)
    if robot.role == "mid_defender":
        return (0.0, 1.3, -f.half_width, f.half_width)
    return (0.8, 2.0, -f.half_width, f.half_width)  # defender


def in_region(region: tuple[float, float, float, float], x: float, y: float) -> bool:
    x0, x1, y0, y1 = region
    return x0 <= x <= x1 and y0 <= y <= y1


def clamp_to_region(region: tuple[float, float, float, float], x: float, y: float) -> tuple[float, float]:
    x0, x1, y0, y1 = region
    return (min(max(x, x0), x1), min(max(y, y0), y1))


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

def _support_target(cfg: SimConfig, leader: RobotSim, mate: RobotSim) -> tuple[float, float]:
    """A forward lane offset away from the leader, clamped into the field."""
    f = cfg.field
    side = 1.0 if mate.y >= leader.y else -1.0
    tx = min(leader.x + 0.9, f.half_length - 0.4)
    ty = leader.y + side * 1.0
    ty = min(max(ty, -f.half_width + 0.3), f.half_width - 0.3)
    return (tx, ty)


def _opponent_ahead(world: World, robot: RobotSim, cone_deg: float = 35.0, reach: float = 0.9) -> bool:
    gx, gy = world.cfg.field.attacked_goal_center
    bearing = math.atan2(gy - robot.y, gx - robot.x)
    for opp in world.defenders() if robot.team == TEAM_ATTACK else world.attackers():
        d = world.dist(robot, opp.x, opp.y)
        if d > reach:
            continue
        ang = math.atan2(opp.y - robot.y, opp.x - robot.x)
        if abs(_wrap(ang - bearing)) <= math.radians(cone_deg):
            return True
    return False


def step_reactive(robot: RobotSim, world: World) -> Intent:
    """Individualistic attacker: chase the ball, carry it toward the goal,
    sidestep or angle the kick around blockers, never plan a pass."""
    cfg = world.cfg
    f = cfg.field
    gx, gy = f.attacked_goal_center

    if world.possession == robot.id:
        dist_goal = world.dist(robot, gx, gy)
        held = world.t - (world.hold_since or world.t)
        blocked = _opponent_ahead(world, robot)
        corner = f.goal_half_width - 0.05
        corner_y = corner if robot.y >= 0 else -corner
        if robot.x >= f.box_min_x - 0.1:
            # never carry into the box; smash it
            return Intent(kick=(gx, corner_y), kick_power=cfg.smash_power)
        if dist_goal <= cfg.shoot_range and not blocked:
            # smash at the near corner rather than placing it at the keeper
            return Intent(kick=(gx, corner_y), kick_power=cfg.smash_power)
        if held >= cfg.hold_limit:
            # forced release; angle it away from a blocker if there is one
            if blocked:
                side = 1.0 if robot.y <= 0 else -1.0
                return Intent(kick=(gx, gy + side * f.goal_half_width * 2.0),
                              kick_power=cfg.smash_power)
            return Intent(kick=(gx, gy), kick_power=cfg.smash_power)
        if blocked and world.dist(robot, *min(
            (world.defenders() if robot.team == TEAM_ATTACK else world.attackers()),
            key=lambda o: (world.dist(robot, o.x, o.y), o.id),
        ).__dict__.get('__never__', (0, 0)) if False else blocked:
            # dribble: cut hard to the side away from the nearest blocker
            bearing = math.atan2(gy - robot.y, gx - robot.x)
            rivals = world.defenders() if robot.team == TEAM_ATTACK else world.attackers()
            nearest = min(rivals, key=lambda o: (world.dist(robot, o.x, o.y), o.id))
            rel = _wrap(math.atan2(nearest.y - robot.y, nearest.x - robot.x) - bearing)
            side = -1.0 if rel >= 0 else 1.0
            ang = bearing + side * math.radians(110.0)
            tx = robot.x + 0.7 * math.cos(ang)
            ty = robot.y + 0.7 * math.sin(ang)
            ty = min(max(ty, -f.half_width + 0.2), f.half_width - 0.2)
            tx = min(max(tx, -f.half_length + 0.2), f.half_length - 0.2)
            return Intent(move=(tx, ty))
        return Intent(move=(gx, gy))

    holder = world.possession
    if holder is not None and world.robot(holder).team == robot.team:
        return Intent(move=_support_target(cfg, world.robot(holder), robot))

    # free ball (or opponents have it): the nearer attacker chases
    mates = [r for r in world.robots if r.team == robot.team]
    chaser = min(mates, key=lambda r: (world.ball_dist(r), r.id))
    if chaser.id == robot.id:
        return Intent(move=(world.ball_x, world.ball_y), grab=True)
    return Intent(move=_support_target(cfg, chaser, robot))


# -- coordination state machine for the case-based team --

PHASE_SELECT = "select_coordinator"
PHASE_RETRIEVING = "retrieving"
PHASE_POSITIONING = "positioning"
PHASE_EXECUTING = "executing"
PHASE_REPORTING = "reporting"
PHASE_ABORTED = "aborted"


@dataclass
class CoordinationState:
    phase: str = PHASE_SELECT
    coordinator: Optional[int] = None
    case: Optional[Case] = None
    assignment: dict[int, int] = field(default_factory=dict)  # robot id -> slot
    step_index: dict[int, int] = field(default_factory=dict)
    done: dict[int, bool] = field(default_factory=dict)
    phase_since: float = 0.0


def _cbr_support(world: World, robot: RobotSim) -> tuple[float, float]:
    """Forward lane relative to the ball for robots outside the active play."""
    f = world.cfg.field
    side = 1.0 if robot.y >= world.ball_y else -1.0
    tx = min(world.ball_x + 0.9, f.half_length - 0.4)
    ty = min(max(world.ball_y + side * 1.0, -f.half_width + 0.3), f.half_width - 0.3)
    return (tx, ty)


def _problem_snapshot(world: World) -> ProblemSnapshot:
    return ProblemSnapshot(
        ball=(world.ball_x, world.ball_y),
        robots=tuple((r.id, (r.x, r.y)) for r in sorted(world.attackers(), key=lambda r: r.id)),
        opponents=tuple((r.id, (r.x, r.y)) for r in sorted(world.defenders(), key=lambda r: r.id)),
        defending_goal=GOAL_NEG_X,
    )


def _resolve_target(world: World, target) -> tuple[float, float]:
    if target == GOAL_TARGET:
        return world.cfg.field.attacked_goal_center
    return target


class CbrController:
    """Drives retrieval, positioning and synchronized play execution.

    The coordinator is the attacker closer to the ball.  When no case is
    applicable the team falls back to the reactive behaviour for the tick.
    Positioning aborts if the case scope no longer holds; execution aborts if
    the opponents win the ball.
    """

    def __init__(self, casebase: CaseBase):
        self.casebase = casebase
        self.state = CoordinationState()

    def _reset(self, world: World, phase: str = PHASE_SELECT) -> None:
        self.state = CoordinationState(phase=phase, phase_since=world.t)

    def _applicable(self, world: World, during_execution: bool) -> bool:
        holder = world.possession
        if holder is not None and world.robot(holder).team == TEAM_DEFEND:
            return False
        if during_execution:
            return True
        return self.casebase.in_scope(self.state.case, _problem_snapshot(world))

    def step(self, world: World) -> dict[int, Intent]:
        st = self.state
        attackers = sorted(world.attackers(), key=lambda r: r.id)

        if st.phase == PHASE_ABORTED:
            self._reset(world)
            st = self.state

        if st.phase == PHASE_SELECT:
            st.coordinator = min(attackers, key=lambda r: (world.ball_dist(r), r.id)).id
            st.phase = PHASE_RETRIEVING
            st.phase_since = world.t

        if st.phase == PHASE_RETRIEVING:
            result = None
            holder = world.possession
            opponents_have_ball = (
                holder is not None and world.robot(holder).team == TEAM_DEFEND
            )
            if not opponents_have_ball:
                result = self.casebase.retrieve(_problem_snapshot(world))
            if result is None:
                # no applicable case: reactive fallback this tick, retry next
                self._reset(world)
                return {r.id: step_reactive(r, world) for r in attackers}
            st.case, st.assignment = result
            st.step_index = {rid: 0 for rid in st.assignment}
            st.done = {rid: False for rid in st.assignment}
            st.phase = PHASE_POSITIONING
            st.phase_since = world.t

        intents: dict[int, Intent] = {}

        if st.phase == PHASE_POSITIONING:
            if not self._applicable(world, during_execution=False):
                self._reset(world, PHASE_ABORTED)
                return {r.id: IDLE for r in attackers}
            if world.t - st.phase_since > world.cfg.positioning_timeout:
                self._reset(world, PHASE_ABORTED)
                return {r.id: IDLE for r in attackers}
            all_there = True
            for r in attackers:
                slot = st.assignment.get(r.id)
                if slot is None:
                    intents[r.id] = Intent(move=_cbr_support(world, r))
                    continue
                target = st.case.adapted[slot]
                if world.dist(r, *target) > world.cfg.pos_tol:
                    all_there = False
                    intents[r.id] = Intent(move=target)
                else:
                    intents[r.id] = Intent(face=(world.ball_x, world.ball_y))
            if all_there:
                st.phase = PHASE_EXECUTING
                st.phase_since = world.t
            return intents

        if st.phase == PHASE_EXECUTING:
            if not self._applicable(world, during_execution=True):
                self._reset(world, PHASE_ABORTED)
                return {r.id: IDLE for r in attackers}
            for r in attackers:
                slot = st.assignment.get(r.id)
                if slot is None:
                    intents[r.id] = Intent(move=_cbr_support(world, r))
                    continue
                intents[r.id] = self._play_intent(world, r, slot)
            if all(st.done.get(rid, True) for rid in st.assignment):
                st.phase = PHASE_REPORTING
                st.phase_since = world.t
            return intents

        if st.phase == PHASE_REPORTING:
            self._reset(world)
            return {r.id: IDLE for r in attackers}

        return {r.id: IDLE for r in attackers}

    def _play_intent(self, world: World, robot: RobotSim, slot: int) -> Intent:
        st = self.state
        play = st.case.plays[slot]
        idx = st.step_index.get(robot.id, 0)
        while idx < len(play):
            step = play[idx]
            if step.op == "move_to":
                target = _resolve_target(world, step.target)
                if world.dist(robot, *target) <= world.cfg.pos_tol:
                    idx += 1
                    continue
                st.step_index[robot.id] = idx
                return Intent(move=target)
            if step.op == "grab":
                if world.possession == robot.id:
                    idx += 1
                    continue
                st.step_index[robot.id] = idx
                # receive: hold position until the ball comes within reach
                if world.ball_dist(robot) > 1.0:
                    return Intent(face=(world.ball_x, world.ball_y))
                return Intent(move=(world.ball_x, world.ball_y), grab=True)
            if step.op == "kick":
                if world.possession != robot.id:
                    # cannot kick yet; close on the ball
                    st.step_index[robot.id] = idx
                    return Intent(move=(world.ball_x, world.ball_y), grab=True)
                st.step_index[robot.id] = idx + 1
                return Intent(kick=_resolve_target(world, step.target))
            idx += 1
        st.step_index[robot.id] = idx
        st.done[robot.id] = True
        if world.possession != robot.id:
            return Intent(move=_cbr_support(world, robot))
        return Intent(face=(world.ball_x, world.ball_y))


def step_cbr(world: World, controller: CbrController) -> dict[int, Intent]:
    return controller.step(world)


def _clear_target(world: World) -> tuple[float, float]:
    """Upfield clearance aimed away from the nearer attacker."""
    candidates = ((-2.4, 1.2), (-2.4, -1.2))
    def clearance(c):
        return min(world.dist(a, c[0], c[1]) for a in world.attackers())
    return max(candidates, key=clearance)


def _goalie_guard(world: World) -> tuple[float, float]:
    """Point on the ball-to-goal line at the goalie's guard depth."""
    f = world.cfg.field
    gx, gy = f.attacked_goal_center
    guard_x = f.half_length - 0.35
    bx, by = world.ball_x, world.ball_y
    if bx >= guard_x:
        y = by
    else:
        frac = (guard_x - bx) / (gx - bx)
        y = by + (gy - by) * frac
    limit = f.goal_half_width - 0.15
    return (guard_x, min(max(y, -limit), limit))


def step_opponents(world: World) -> dict[int, Intent]:
    """Home-region defense: clear the ball when it is inside the region,
    otherwise wait on the boundary facing the ball.  The goalie guards the
    ball-to-goal line inside the box."""
    cfg = world.cfg
    intents: dict[int, Intent] = {}
    for r in sorted(world.defenders(), key=lambda r: r.id):
        region = home_region(cfg, r)
        if world.possession == r.id:
            intents[r.id] = Intent(kick=_clear_target(world), kick_power=cfg.clear_power)
        elif in_region(region, world.ball_x, world.ball_y):
            # cut toward where the ball is heading, not where it is
            lead = 0.4 if r.role == "goalie" else 0.2
            tx = world.ball_x + world.ball_vx * lead
            ty = world.ball_y + world.ball_vy * lead
            intents[r.id] = Intent(move=(tx, ty), grab=True)
        elif r.role == "goalie":
            intents[r.id] = Intent(move=_goalie_guard(world), face=(world.ball_x, world.ball_y))
        else:
            bx, by = clamp_to_region(region, world.ball_x, world.ball_y)
            intents[r.id] = Intent(move=(bx, by), face=(world.ball_x, world.ball_y))
    return intents


# ---------------------------------------------------------------------------
# Physics
# ---------------------------------------------------------------------------

def _wrap(a: float) -> float:
    while a > math.pi:
        a -= 2 * math.pi
    while a <= -math.pi:
        a += 2 * math.pi
    return a


def physics_step(world: World, intents: dict[int, Intent]) -> None:
    """Advance the world one tick: kicks, robot motion, ball motion, steals
    and grab attempts, consuming randomness in a fixed order."""
    cfg = world.cfg
    f = cfg.field
    dt = cfg.dt
    rng = world.rng

    # 1. kick by the holder
    holder_intent = intents.get(world.possession) if world.possession is not None else None
    if world.possession is not None and holder_intent is not None and holder_intent.kick:
        kicker = world.robot(world.possession)
        tx, ty = holder_intent.kick
        bearing = math.atan2(ty - kicker.y, tx - kicker.x)
        bearing += math.radians(cfg.kick_noise_deg) * rng.uniform(-1.0, 1.0)
        speed = cfg.kick_speed * holder_intent.kick_power
        speed *= 1.0 + cfg.kick_speed_spread * rng.uniform(-1.0, 1.0)
        world.ball_vx = speed * math.cos(bearing)
        world.ball_vy = speed * math.sin(bearing)
        world.ball_x = kicker.x + cfg.carry_offset * math.cos(bearing)
        world.ball_y = kicker.y + cfg.carry_offset * math.sin(bearing)
        kicker.heading = bearing
        world.cooldown_until[kicker.id] = world.t + cfg.grab_cooldown
        world.possession = None
        world.hold_since = None

    # 2. robot motion
    for r in world.robots:
        it = intents.get(r.id, IDLE)
        if it.move is not None:
            tx, ty = it.move
            if r.team == TEAM_DEFEND:
                tx, ty = clamp_to_region(home_region(cfg, r), tx, ty)
            else:
                tx = min(max(tx, -f.half_length + 0.05), f.half_length - 0.05)
                ty = min(max(ty, -f.half_width + 0.05), f.half_width - 0.05)
            dx, dy = tx - r.x, ty - r.y
            d = math.hypot(dx, dy)
            if d > 1e-9:
                speed = cfg.max_speed if r.team == TEAM_ATTACK else cfg.defender_speed
                step = min(speed * dt, d)
                r.x += dx / d * step
                r.y += dy / d * step
                r.heading = math.atan2(dy, dx)
        elif it.face is not None:
            r.heading = math.atan2(it.face[1] - r.y, it.face[0] - r.x)
        if r.team == TEAM_DEFEND:
            # defenders may never stray from their region (goalie: the box)
            r.x, r.y = clamp_to_region(home_region(cfg, r), r.x, r.y)

    # 3. ball motion
    if world.possession is not None:
        h = world.robot(world.possession)
        world.ball_x = h.x + cfg.carry_offset * math.cos(h.heading)
        world.ball_y = h.y + cfg.carry_offset * math.sin(h.heading)
        world.ball_vx = 0.0
        world.ball_vy = 0.0
    else:
        speed = math.hypot(world.ball_vx, world.ball_vy)
        if speed > 0:
            new_speed = max(0.0, speed - cfg.friction * dt)
            scale = new_speed / speed if speed else 0.0
            world.ball_vx *= scale
            world.ball_vy *= scale
        world.ball_x += world.ball_vx * dt
        world.ball_y += world.ball_vy * dt

    # 4. steals from the holder
    if world.possession is not None:
        holder = world.robot(world.possession)
        rivals = world.attackers() if holder.team == TEAM_DEFEND else world.defenders()
        for rival in sorted(rivals, key=lambda r: r.id):
            if world.dist(rival, holder.x, holder.y) <= cfg.steal_radius:
                if rng.random() < cfg.steal_prob:
                    world.possession = rival.id
                    world.hold_since = world.t + dt
                    world.cooldown_until[holder.id] = world.t + cfg.grab_cooldown
                    world.ball_x = rival.x + cfg.carry_offset * math.cos(rival.heading)
                    world.ball_y = rival.y + cfg.carry_offset * math.sin(rival.heading)
                    world.ball_vx = world.ball_vy = 0.0
                    break

    # 5. grab attempts on a free, slow-enough ball
    ball_speed = math.hypot(world.ball_vx, world.ball_vy)
    if world.possession is None and ball_speed <= cfg.max_grab_speed:
        contenders = [
            r
            for r in world.robots
            if intents.get(r.id, IDLE).grab
            and world.ball_dist(r) <= cfg.grab_radius
            and world.cooldown_until.get(r.id, 0.0) <= world.t
        ]
        for r in sorted(contenders, key=lambda r: (world.ball_dist(r), r.id)):
            if rng.random() >= cfg.grab_failure:
                world.possession = r.id
                world.hold_since = world.t + dt
                world.ball_vx = world.ball_vy = 0.0
                break

    world.tick += 1
    world.t = world.tick * dt


# ---------------------------------------------------------------------------
# Trial loop
# ---------------------------------------------------------------------------

def snapshot(world: World) -> Frame:
    return Frame(
        t=world.t,
        robots=tuple(
            RobotState(r.id, r.team, r.x, r.y, r.heading)
            for r in sorted(world.robots, key=lambda r: r.id)
        ),
        ball=BallState(world.ball_x, world.ball_y, world.ball_vx, world.ball_vy),
        possession=world.possession,
    )


def run_trial(
    config: SimConfig,
    casebase: Optional[CaseBase] = None,
    on_step: Optional[Callable[[World, Optional[CbrController]], None]] = None,
) -> TrialLog:
    """Run one trial to its outcome; the log is fully determined by the seed."""
    if config.approach == "cbr" and casebase is None:
        raise ValueError("the cbr approach requires a casebase")
    world = make_world(config)
    controller = CbrController(casebase) if config.approach == "cbr" else None
    frames = [snapshot(world)]
    outcome: Optional[tuple[str, float]] = None

    while True:
        if controller is not None:
            intents = dict(controller.step(world))
        else:
            intents = {r.id: step_reactive(r, world) for r in world.attackers()}
        intents.update(step_opponents(world))
        physics_step(world, intents)
        frames.append(snapshot(world))
        if on_step is not None:
            on_step(world, controller)

        exit_kind = config.field.classify_exit(world.ball_x, world.ball_y, 0.3)
        if exit_kind is not None:
            outcome = (exit_kind, world.t)
            break
        if world.t >= config.timeout - 1e-9:
            outcome = ("out_of_time", world.t)
            break

    return TrialLog(frames, outcome)
