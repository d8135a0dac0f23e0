"""Predicate vocabulary shared by the abstraction, mining and scoring layers."""

NEXT = "next_a"

GETBALL = "getball"
CATCH = "catch"
PASS = "pass"
DRIBBLING = "dribbling"
PROGRESS = "progressToGoal"
ALONE_PROGRESS = "aloneProgressToGoal"
INTERCEPT = "intercept"

# Order matters for report tables.
ACTION_PREDICATES = (
    PASS,
    DRIBBLING,
    CATCH,
    INTERCEPT,
    ALONE_PROGRESS,
    PROGRESS,
    GETBALL,
)

DIRECTION_VIEW = "direction_view"
REL_WITH_BALL = "rel_with_ball"
REL_WITH_TEAM = "rel_with_team"
REL_WITH_OPP1 = "rel_with_opp1"
REL_WITH_OPP2 = "rel_with_opp2"

RELATION_PREDICATES = (
    DIRECTION_VIEW,
    REL_WITH_BALL,
    REL_WITH_TEAM,
    REL_WITH_OPP1,
    REL_WITH_OPP2,
)

GOAL = "goal"
TO_GOAL = "to_goal"
BALL_OUT = "ball_out"
BLOCK = "block"
OUT_OF_TIME = "out_of_time"

OUTCOME_PREDICATES = (GOAL, TO_GOAL, BALL_OUT, BLOCK, OUT_OF_TIME)

AGENT = "agent"
OPPONENT = "opponent"

ROLE_PREDICATES = (AGENT, OPPONENT)

# Values of the qualitative spatial relations.
VIEW_VALUES = ("front", "left", "right", "backwards")
HORIZONTAL_VALUES = ("forward", "behind", "same")
VERTICAL_VALUES = ("left", "right", "same")

TEAM_ATTACK = "attack"
TEAM_DEFEND = "defend"

CLASS_CBR = "cbr"
CLASS_REA = "rea"
CLASS_LABELS = (CLASS_CBR, CLASS_REA)
