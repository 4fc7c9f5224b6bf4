from .grid import OccupancyGrid, inflate, load_map, parse_map_text
from .planner import a_star_cells, plan
from .robot import NavGoal, NavParams, NavState, NavStatus, RobotSim, RobotState
from .stages import Stage, StageCheck, check_stage, footprint_corners, load_stages, parse_stages_text

__all__ = [
    "OccupancyGrid",
    "inflate",
    "load_map",
    "parse_map_text",
    "a_star_cells",
    "plan",
    "NavGoal",
    "NavParams",
    "NavState",
    "NavStatus",
    "RobotSim",
    "RobotState",
    "Stage",
    "StageCheck",
    "check_stage",
    "footprint_corners",
    "load_stages",
    "parse_stages_text",
]
