"""From raw trial logs to relational sequences.

Low-level events (possession changes, challenges, ball exits) are detected
with persistence, then classified into the seven player actions.  Each action
atom is accompanied by five egocentric world-relation atoms computed at the
action's frame, actions are chained with next_a, and the episode outcome atom
plus the agent/opponent role facts close the sequence.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from . import vocab
from .field import FieldModel
from .logic import Atom, RelationalSequence, atom
from .trial import Frame, TrialLog
from .vocab import (
    ALONE_PROGRESS,
    BLOCK,
    CATCH,
    DRIBBLING,
    GETBALL,
    INTERCEPT,
    NEXT,
    OUT_OF_TIME,
    PASS,
    PROGRESS,
    TEAM_ATTACK,
    TEAM_DEFEND,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbstractionConfig:
    """Thresholds for event and action recognition.

    Defaults are sized for a 6 m x 4 m field with 0.3 m/s robots.
    """

    t_free: float = 1.0            # free-ball duration before a gain is a getball
    d_dribble: float = 0.5         # displacement to escape a challenge
    d_progress: float = 0.5        # net advance toward the box per progress action
    challenge_radius: float = 0.4  # opponent distance that opens a challenge
    challenge_release: float = 1.3  # challenge persists until radius * release
    same_eps: float = 0.1          # dead zone for the "same" relation value
    near_post_margin: float = 0.3  # exit distance outside a post counted as to_goal
    kick_speed_min: float = 0.8    # ball speed at release that counts as a kick
    field: FieldModel = field(default_factory=FieldModel)


@dataclass
class Event:
    kind: str                      # possession_gain | possession_challenge | ball_out | goal_line_cross | block
    t_start: float
    t_end: float
    subject: Optional[int] = None
    contemporary_with: Optional["Event"] = None


@dataclass(frozen=True)
class ActionAtomGroup:
    """One recognised action and the world description at its moment."""

    time_constant: str
    action: Atom
    relations: tuple[Atom, ...]
    t: float
    actor: int


@dataclass(frozen=True)
class TrialOutcome:
    kind: str
    t: float

    def as_atom(self, time_constant: str) -> Atom:
        return atom(self.kind, time_constant)


def canonical_names(log_: TrialLog) -> dict[int, str]:
    """Stable robot names: attackers become robot_1.., opponents op_1.. by id."""
    first = log_.frames[0]
    names: dict[int, str] = {}
    for i, r in enumerate(sorted(first.attackers(), key=lambda r: r.id), start=1):
        names[r.id] = f"robot_{i}"
    for i, r in enumerate(sorted(first.defenders(), key=lambda r: r.id), start=1):
        names[r.id] = f"op_{i}"
    return names


# ---------------------------------------------------------------------------
# Event detection
# ---------------------------------------------------------------------------

def detect_events(log_: TrialLog, cfg: AbstractionConfig | None = None) -> list[Event]:
    """Events ordered by start time; challenges are contemporary to the
    possession event they interrupt and end with it at the latest."""
    cfg = cfg or AbstractionConfig()
    if not log_.frames:
        raise ValueError("log has no frames")
    log_.validate_times()

    events: list[Event] = []
    open_poss: Optional[Event] = None
    open_challenges: dict[int, Event] = {}
    prev_poss: Optional[int] = None

    def close_all(t: float) -> None:
        nonlocal open_poss
        for ev in open_challenges.values():
            ev.t_end = t
        open_challenges.clear()
        if open_poss is not None:
            open_poss.t_end = t
            open_poss = None

    for frame in log_.frames:
        poss = frame.possession
        if poss != prev_poss:
            close_all(frame.t)
            if poss is not None:
                open_poss = Event("possession_gain", frame.t, frame.t, poss)
                events.append(open_poss)
                if (
                    frame.robot(poss).team == TEAM_DEFEND
                    and cfg.field.in_penalty_box(frame.ball.x, frame.ball.y)
                ):
                    events.append(Event("block", frame.t, frame.t, poss))
            prev_poss = poss
        if open_poss is not None:
            holder = frame.robot(open_poss.subject)
            rivals = frame.defenders() if holder.team == TEAM_ATTACK else frame.attackers()
            dists = {
                r.id: math.hypot(r.x - holder.x, r.y - holder.y) for r in rivals
            }
            near = {rid for rid, d in dists.items() if d <= cfg.challenge_radius}
            # persistence: an open challenge survives until clearly broken
            release = cfg.challenge_radius * cfg.challenge_release
            gone = {
                rid for rid in open_challenges if dists.get(rid, math.inf) > release
            }
            for rid in sorted(near - open_challenges.keys()):
                ev = Event(
                    "possession_challenge", frame.t, frame.t, rid, contemporary_with=open_poss
                )
                open_challenges[rid] = ev
                events.append(ev)
            for rid in sorted(gone):
                open_challenges.pop(rid).t_end = frame.t
            for ev in open_challenges.values():
                ev.t_end = frame.t
            open_poss.t_end = frame.t
        if not cfg.field.contains(frame.ball.x, frame.ball.y):
            kind = "goal_line_cross" if abs(frame.ball.x) > cfg.field.half_length else "ball_out"
            close_all(frame.t)
            events.append(Event(kind, frame.t, frame.t))
            prev_poss = None

    close_all(log_.frames[-1].t)
    events.sort(key=lambda e: e.t_start)
    return events


# ---------------------------------------------------------------------------
# World description
# ---------------------------------------------------------------------------

def _wrap_angle(a: float) -> float:
    while a > math.pi:
        a -= 2 * math.pi
    while a <= -math.pi:
        a += 2 * math.pi
    return a


def _view_sector(diff: float) -> str:
    deg = math.degrees(diff)
    if -45.0 <= deg < 45.0:
        return "front"
    if 45.0 <= deg < 135.0:
        return "left"
    if -135.0 <= deg < -45.0:
        return "right"
    return "backwards"


def _rel_values(dx: float, dy: float, heading: float, eps: float) -> tuple[str, str]:
    fwd = math.cos(heading) * dx + math.sin(heading) * dy
    left = -math.sin(heading) * dx + math.cos(heading) * dy
    if fwd > eps:
        horizontal = "forward"
    elif fwd < -eps:
        horizontal = "behind"
    else:
        horizontal = "same"
    if left > eps:
        vertical = "left"
    elif left < -eps:
        vertical = "right"
    else:
        vertical = "same"
    return horizontal, vertical


def describe_world(
    frame: Frame,
    actor_id: int,
    time_constant: str,
    cfg: AbstractionConfig | None = None,
    names: Optional[dict[int, str]] = None,
) -> tuple[Atom, ...]:
    """The five relation atoms for `actor_id` at `frame`.

    direction_view quantises the actor's heading relative to the bearing of
    the opponent penalty box into four 90-degree sectors; the pairwise
    relations are egocentric with a `same` dead zone of cfg.same_eps.
    """
    cfg = cfg or AbstractionConfig()
    actor = frame.robot(actor_id)
    if names is None:
        names = {r.id: f"robot_{r.id}" for r in frame.robots}
    actor_name = names[actor_id]

    bearing = cfg.field.bearing_to_box(actor.x, actor.y)
    view = _view_sector(_wrap_angle(actor.heading - bearing))

    def rel(pred: str, x: float, y: float) -> Atom:
        h, v = _rel_values(x - actor.x, y - actor.y, actor.heading, cfg.same_eps)
        return atom(pred, time_constant, actor_name, h, v)

    teammates = [r for r in frame.robots if r.team == actor.team and r.id != actor_id]
    opponents = sorted(
        (r for r in frame.robots if r.team != actor.team), key=lambda r: r.id
    )
    if not teammates or len(opponents) < 2:
        raise ValueError("describe_world expects a 2 vs 2 frame")

    return (
        rel(vocab.REL_WITH_TEAM, teammates[0].x, teammates[0].y),
        atom(vocab.DIRECTION_VIEW, time_constant, actor_name, view),
        rel(vocab.REL_WITH_BALL, frame.ball.x, frame.ball.y),
        rel(vocab.REL_WITH_OPP1, opponents[0].x, opponents[0].y),
        rel(vocab.REL_WITH_OPP2, opponents[1].x, opponents[1].y),
    )


# ---------------------------------------------------------------------------
# Action classification
# ---------------------------------------------------------------------------

@dataclass
class _RawAction:
    t: float
    predicate: str
    players: tuple[int, ...]  # actor last for pass (kicker, receiver)
    actor: int                # subject of the relation atoms
    frame: Frame


def _dist_to_box(cfg: AbstractionConfig, x: float, y: float) -> float:
    bx, by = cfg.field.penalty_box_center
    return math.hypot(bx - x, by - y)


def _teammate_ahead(frame: Frame, holder_id: int) -> bool:
    holder = frame.robot(holder_id)
    return any(
        r.x > holder.x
        for r in frame.robots
        if r.team == holder.team and r.id != holder_id
    )


def classify_actions(
    events: list[Event],
    log_: TrialLog,
    cfg: AbstractionConfig | None = None,
) -> list[ActionAtomGroup]:
    """Apply the action decision rules to the detected possession events.

    Gains: free for at least t_free -> getball; taken from an opponent ->
    catch; from a teammate's kick -> pass (relations follow the receiver);
    lost to the other team -> intercept charged to the loser.  While held:
    escaping a challenge over d_dribble -> dribbling; advancing d_progress
    toward the box unchallenged -> progressToGoal, or aloneProgressToGoal
    when no teammate is between the holder and the goal area.
    """
    cfg = cfg or AbstractionConfig()
    frames = log_.frames
    poss_events = [e for e in events if e.kind == "possession_gain"]
    challenges = [e for e in events if e.kind == "possession_challenge"]

    raw: list[_RawAction] = []
    last_owner: Optional[int] = None
    last_owner_team: Optional[str] = None
    release_t: Optional[float] = None
    release_kick = False

    frame_at = {f.t: f for f in frames}

    for pe in poss_events:
        gain_frame = frame_at[pe.t_start]
        robot = gain_frame.robot(pe.subject)
        gap = math.inf if release_t is None else pe.t_start - release_t

        if robot.team == TEAM_ATTACK:
            if last_owner is None or gap >= cfg.t_free:
                raw.append(_RawAction(pe.t_start, GETBALL, (pe.subject,), pe.subject, gain_frame))
            elif last_owner_team == TEAM_DEFEND:
                raw.append(_RawAction(pe.t_start, CATCH, (pe.subject,), pe.subject, gain_frame))
            elif last_owner != pe.subject and release_kick:
                raw.append(
                    _RawAction(
                        pe.t_start, PASS, (last_owner, pe.subject), pe.subject, gain_frame
                    )
                )
            else:
                log.warning(
                    "unclassifiable possession gain by %s at t=%.2f; treating as getball",
                    pe.subject,
                    pe.t_start,
                )
                raw.append(_RawAction(pe.t_start, GETBALL, (pe.subject,), pe.subject, gain_frame))

            raw.extend(_holding_actions(pe, challenges, frames, cfg))
        else:
            if last_owner is not None and last_owner_team == TEAM_ATTACK:
                raw.append(
                    _RawAction(pe.t_start, INTERCEPT, (last_owner,), last_owner, gain_frame)
                )

        last_owner = pe.subject
        last_owner_team = robot.team
        release_t = pe.t_end
        # At the release frame the ball already carries the kicked velocity;
        # a steal or a drop leaves it (near) stationary.
        release_frame = frame_at.get(pe.t_end)
        release_kick = (
            release_frame is not None and release_frame.ball.speed >= cfg.kick_speed_min
        )

    raw.sort(key=lambda a: a.t)

    names = canonical_names(log_)
    groups: list[ActionAtomGroup] = []
    for i, ra in enumerate(raw, start=1):
        tc = f"time_{i}"
        args = (tc,) + tuple(names[p] for p in ra.players)
        groups.append(
            ActionAtomGroup(
                time_constant=tc,
                action=atom(ra.predicate, *args),
                relations=describe_world(ra.frame, ra.actor, tc, cfg, names),
                t=ra.t,
                actor=ra.actor,
            )
        )
    return groups


def _holding_actions(
    pe: Event,
    challenges: list[Event],
    frames: list[Frame],
    cfg: AbstractionConfig,
) -> list[_RawAction]:
    """Dribbling and progress actions inside one possession interval."""
    holder = pe.subject
    hold = [f for f in frames if pe.t_start <= f.t <= pe.t_end and f.possession == holder]
    if len(hold) < 2:
        return []

    # Merge this possession's challenge events into challenged intervals.
    spans = sorted(
        (c.t_start, c.t_end)
        for c in challenges
        if c.contemporary_with is pe
    )
    merged: list[tuple[float, float]] = []
    for s, e in spans:
        if merged and s <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((s, e))

    def challenged(t: float) -> bool:
        return any(s <= t < e for s, e in merged)

    out: list[_RawAction] = []
    progress = 0.0
    start_robot = hold[0].robot(holder)
    prev_dist = _dist_to_box(cfg, start_robot.x, start_robot.y)
    was_challenged = challenged(hold[0].t)
    challenge_start_pos = (
        (hold[0].robot(holder).x, hold[0].robot(holder).y) if was_challenged else None
    )

    for f in hold[1:]:
        r = f.robot(holder)
        now_challenged = challenged(f.t)
        if now_challenged and not was_challenged:
            challenge_start_pos = (r.x, r.y)
            progress = 0.0
        if was_challenged and not now_challenged:
            # escaped with the ball; a significant displacement is a dribbling
            sx, sy = challenge_start_pos
            if math.hypot(r.x - sx, r.y - sy) >= cfg.d_dribble:
                out.append(_RawAction(f.t, DRIBBLING, (holder,), holder, f))
            challenge_start_pos = None
            progress = 0.0
            prev_dist = _dist_to_box(cfg, r.x, r.y)
        if not now_challenged:
            d = _dist_to_box(cfg, r.x, r.y)
            progress += prev_dist - d
            prev_dist = d
            if progress >= cfg.d_progress:
                pred = PROGRESS if _teammate_ahead(f, holder) else ALONE_PROGRESS
                out.append(_RawAction(f.t, pred, (holder,), holder, f))
                progress = 0.0
        was_challenged = now_challenged
    return out


# ---------------------------------------------------------------------------
# Outcome and sequence emission
# ---------------------------------------------------------------------------

def classify_outcome(log_: TrialLog, cfg: AbstractionConfig | None = None) -> TrialOutcome:
    """Outcome of a terminated episode, derived from the final frames."""
    cfg = cfg or AbstractionConfig()
    if not log_.frames:
        raise ValueError("cannot classify an empty log")
    last = log_.frames[-1]
    exit_kind = cfg.field.classify_exit(last.ball.x, last.ball.y, cfg.near_post_margin)
    if exit_kind is not None:
        return TrialOutcome(exit_kind, last.t)
    if last.possession is not None:
        holder = last.robot(last.possession)
        if holder.team == TEAM_DEFEND and cfg.field.in_penalty_box(last.ball.x, last.ball.y):
            return TrialOutcome(BLOCK, last.t)
    return TrialOutcome(OUT_OF_TIME, last.t)


DEFAULT_ROSTER = ("robot_1", "robot_2", "op_1", "op_2")


def emit_sequence(
    actions: list[ActionAtomGroup],
    outcome: Optional[TrialOutcome],
    class_label: str,
    seq_id: str = "seq",
    roster: tuple[str, ...] = DEFAULT_ROSTER,
) -> RelationalSequence:
    """Assemble the ground sequence: each action atom with its five relation
    atoms, next_a links between consecutive action times, the outcome atom on
    a fresh time constant, then the agent/opponent role facts."""
    if not actions:
        raise ValueError("no actions to emit")
    atoms: list[Atom] = []
    for i, g in enumerate(actions):
        atoms.append(g.action)
        atoms.extend(g.relations)
        if i + 1 < len(actions):
            atoms.append(atom(NEXT, g.time_constant, actions[i + 1].time_constant))
    if outcome is not None:
        atoms.append(outcome.as_atom(f"time_{len(actions) + 1}"))
    agents = [n for n in roster if n.startswith("robot_")]
    opponents = [n for n in roster if n.startswith("op_")]
    for n in agents:
        atoms.append(atom(vocab.AGENT, n))
    for n in opponents:
        atoms.append(atom(vocab.OPPONENT, n))
    return RelationalSequence(seq_id, class_label, tuple(atoms))


# ---------------------------------------------------------------------------
# Segmentation and the full pipeline
# ---------------------------------------------------------------------------

def segment_trial(log_: TrialLog, cfg: AbstractionConfig | None = None) -> list[TrialLog]:
    """Split a trial into attack episodes at block / ball-exit boundaries.

    Each returned sub-log ends on the frame of its boundary event; the final
    stretch (ending at goal, exit or timeout) forms the last segment.
    """
    cfg = cfg or AbstractionConfig()
    if not log_.frames:
        return []
    boundaries: list[int] = []
    prev_poss: Optional[int] = None
    for i, frame in enumerate(log_.frames):
        if not cfg.field.contains(frame.ball.x, frame.ball.y):
            boundaries.append(i)
            prev_poss = None
            continue
        poss = frame.possession
        if poss is not None and poss != prev_poss:
            robot = frame.robot(poss)
            if robot.team == TEAM_DEFEND and cfg.field.in_penalty_box(frame.ball.x, frame.ball.y):
                boundaries.append(i)
        prev_poss = poss
    if not boundaries or boundaries[-1] != len(log_.frames) - 1:
        boundaries.append(len(log_.frames) - 1)

    segments: list[TrialLog] = []
    start = 0
    for b in boundaries:
        frames = log_.frames[start : b + 1]
        if frames:
            segments.append(TrialLog(frames))
        start = b + 1
    return segments


def abstract_log(
    log_: TrialLog,
    class_label: str,
    seq_id: str,
    cfg: AbstractionConfig | None = None,
) -> list[RelationalSequence]:
    """One relational sequence per attack episode that contains actions."""
    cfg = cfg or AbstractionConfig()
    names = canonical_names(log_)
    roster = tuple(sorted(names.values(), key=lambda n: (not n.startswith("robot_"), n)))
    out: list[RelationalSequence] = []
    for k, seg in enumerate(segment_trial(log_, cfg), start=1):
        actions = classify_actions(detect_events(seg, cfg), seg, cfg)
        if not actions:
            continue
        outcome = classify_outcome(seg, cfg)
        out.append(emit_sequence(actions, outcome, class_label, f"{seq_id}.{k}", roster))
    return out
