from .config import ConfigError, ScenarioConfig, load_scenario, parse_scenario
from .geojson_export import ExportError, export_geojson
from .metrics import compute_metrics
from .mission_log import MissionLog, load_log
from .runner import ReplayReport, RunResult, replay_log, run_mission

__all__ = [
    "ConfigError", "ScenarioConfig", "load_scenario", "parse_scenario",
    "ExportError", "export_geojson", "compute_metrics", "MissionLog",
    "load_log", "ReplayReport", "RunResult", "replay_log", "run_mission",
]
