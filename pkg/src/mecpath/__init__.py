"""Path following with feedback linearization and a model error compensator."""

from .controller import ControllerConfig, ControllerGains, Mode
from .path_geometry import CurvatureSegment, SegmentKind, TargetPath, builtin_path
from .simulation import (DIVERGED, Guards, InitialState, RunResult, ScenarioConfig, Status,
                         SweepResult, max_following_error, run, sweep)
from .vehicle_model import VehicleParams, VehicleState

__version__ = "0.1.0"

__all__ = [
    "ControllerConfig", "ControllerGains", "CurvatureSegment", "DIVERGED", "Guards",
    "InitialState", "Mode", "RunResult", "ScenarioConfig", "SegmentKind", "Status",
    "SweepResult", "TargetPath", "VehicleParams", "VehicleState", "builtin_path",
    "max_following_error", "run", "sweep",
]
