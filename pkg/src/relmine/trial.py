"""Trial logs: timestamped frames of robot and ball kinematics.

Wire format is JSON Lines, one frame per line:

    {"t": 0.05, "robots": [{"id": 1, "team": "attack", "x": ..., "y": ...,
     "heading": ...}, ...], "ball": {"x": ..., "y": ..., "vx": ..., "vy": ...},
     "poss": 1}

with an optional final line `{"outcome": "goal", "t": 12.35}`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .vocab import TEAM_ATTACK, TEAM_DEFEND


@dataclass(frozen=True, slots=True)
class RobotState:
    id: int
    team: str
    x: float
    y: float
    heading: float


@dataclass(frozen=True, slots=True)
class BallState:
    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0

    @property
    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


@dataclass(frozen=True, slots=True)
class Frame:
    t: float
    robots: tuple[RobotState, ...]
    ball: BallState
    possession: Optional[int] = None

    def robot(self, robot_id: int) -> RobotState:
        for r in self.robots:
            if r.id == robot_id:
                return r
        raise KeyError(f"no robot {robot_id} in frame at t={self.t}")

    def attackers(self) -> list[RobotState]:
        return [r for r in self.robots if r.team == TEAM_ATTACK]

    def defenders(self) -> list[RobotState]:
        return [r for r in self.robots if r.team == TEAM_DEFEND]


@dataclass
class TrialLog:
    frames: list[Frame]
    outcome: Optional[tuple[str, float]] = None  # (kind, t)

    def __len__(self) -> int:
        return len(self.frames)

    def validate_times(self) -> None:
        ts = [f.t for f in self.frames]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("frame timestamps must be strictly increasing")


def _round(v: float) -> float:
    return round(v, 6)


def frame_to_json(frame: Frame) -> str:
    obj = {
        "t": _round(frame.t),
        "robots": [
            {
                "id": r.id,
                "team": r.team,
                "x": _round(r.x),
                "y": _round(r.y),
                "heading": _round(r.heading),
            }
            for r in frame.robots
        ],
        "ball": {
            "x": _round(frame.ball.x),
            "y": _round(frame.ball.y),
            "vx": _round(frame.ball.vx),
            "vy": _round(frame.ball.vy),
        },
        "poss": frame.possession,
    }
    return json.dumps(obj, separators=(",", ":"))


def write_trial_log(log: TrialLog, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for frame in log.frames:
            fh.write(frame_to_json(frame) + "\n")
        if log.outcome is not None:
            kind, t = log.outcome
            fh.write(json.dumps({"outcome": kind, "t": _round(t)}) + "\n")


def read_trial_log(path: str | Path) -> TrialLog:
    path = Path(path)
    frames: list[Frame] = []
    outcome: Optional[tuple[str, float]] = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "outcome" in obj:
                outcome = (obj["outcome"], float(obj["t"]))
                continue
            try:
                robots = tuple(
                    RobotState(
                        id=int(r["id"]),
                        team=r["team"],
                        x=float(r["x"]),
                        y=float(r["y"]),
                        heading=float(r["heading"]),
                    )
                    for r in obj["robots"]
                )
                ball = BallState(
                    x=float(obj["ball"]["x"]),
                    y=float(obj["ball"]["y"]),
                    vx=float(obj["ball"].get("vx", 0.0)),
                    vy=float(obj["ball"].get("vy", 0.0)),
                )
                poss = obj.get("poss")
                frames.append(Frame(float(obj["t"]), robots, ball, poss))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad frame: {exc}") from exc
    log = TrialLog(frames, outcome)
    log.validate_times()
    return log
