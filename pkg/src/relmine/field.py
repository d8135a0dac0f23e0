"""Field geometry: bounds, goals, penalty box and the region grid.

Convention: the attacking team always plays toward +x.  The goal on the +x
end line is "yellow", the one on the -x end is "cyan"; the attackers defend
cyan.  The region grid tiles the field into 1 m cells used by case scopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

GOAL_POS_X = "yellow"
GOAL_NEG_X = "cyan"

Region = tuple[int, int]  # (col, row) on the grid


@dataclass(frozen=True)
class FieldModel:
    length: float = 6.0
    width: float = 4.0
    goal_half_width: float = 0.7
    penalty_depth: float = 1.0
    penalty_half_width: float = 1.0
    grid_cols: int = 6
    grid_rows: int = 4

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    def contains(self, x: float, y: float) -> bool:
        return abs(x) <= self.half_length and abs(y) <= self.half_width

    # -- penalty box (always at the attacked, +x end) --

    @property
    def box_min_x(self) -> float:
        return self.half_length - self.penalty_depth

    def in_penalty_box(self, x: float, y: float) -> bool:
        return x >= self.box_min_x and abs(y) <= self.penalty_half_width

    @property
    def penalty_box_center(self) -> tuple[float, float]:
        return (self.half_length - self.penalty_depth / 2.0, 0.0)

    @property
    def attacked_goal_center(self) -> tuple[float, float]:
        return (self.half_length, 0.0)

    def bearing_to_box(self, x: float, y: float) -> float:
        cx, cy = self.penalty_box_center
        return math.atan2(cy - y, cx - x)

    # -- region grid --

    def region_of(self, x: float, y: float) -> Region:
        col = int((x + self.half_length) / self.length * self.grid_cols)
        row = int((y + self.half_width) / self.width * self.grid_rows)
        col = min(max(col, 0), self.grid_cols - 1)
        row = min(max(row, 0), self.grid_rows - 1)
        return (col, row)

    def region_center(self, region: Region) -> tuple[float, float]:
        col, row = region
        cx = -self.half_length + (col + 0.5) * self.length / self.grid_cols
        cy = -self.half_width + (row + 0.5) * self.width / self.grid_rows
        return (cx, cy)

    def mirror_region_long(self, region: Region) -> Region:
        col, row = region
        return (col, self.grid_rows - 1 - row)

    def mirror_region_mid(self, region: Region) -> Region:
        col, row = region
        return (self.grid_cols - 1 - col, row)

    # -- exits --

    def classify_exit(self, x: float, y: float, near_post_margin: float) -> str | None:
        """Outcome kind for a ball at (x, y), or None while still in play.

        goal: over the attacked end line between the posts; to_goal: over that
        line within `near_post_margin` outside a post; ball_out: any other
        exit.
        """
        if self.contains(x, y):
            return None
        if x > self.half_length:
            if abs(y) <= self.goal_half_width:
                return "goal"
            if abs(y) <= self.goal_half_width + near_post_margin:
                return "to_goal"
        return "ball_out"
