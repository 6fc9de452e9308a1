from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError
from typing import Any, Dict, Optional
import os

from Entity.experiment import ExperimentConfig
from Service.base_service import VilenkinError

load_dotenv()

LOG_LEVEL = os.getenv("VILENKIN_LOG_LEVEL", "WARNING")

# Environment variable -> config field
ENV_KEYS = {
    "VILENKIN_RADIX": "radix",
    "VILENKIN_DEPTH": "depth",
    "VILENKIN_THREADS": "threads",
    "VILENKIN_SEED": "seed",
    "VILENKIN_FORMAT": "format",
    "VILENKIN_TOLERANCE": "tolerance",
    "VILENKIN_ORACLE_TOLERANCE": "oracle_tolerance",
}


def env_defaults() -> Dict[str, Any]:
    """Defaults taken from the environment (.env included), only for variables that are set"""
    values = {}
    for env_name, field in ENV_KEYS.items():
        value = os.getenv(env_name)
        if value not in (None, ""):
            values[field] = value
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a plain key=value config file; keys may use dashes or underscores"""
    if not os.path.isfile(path):
        raise VilenkinError("invalid-argument", f"config file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        field = key.strip().lower().replace("-", "_")
        if field == "experiment" or field not in ExperimentConfig.model_fields:
            raise VilenkinError("invalid-argument", f"unknown config key {key!r} in {path}")
        if value is not None:
            values[field] = value
    return values


def build_config(experiment: str, overrides: Dict[str, Any], config_path: Optional[str] = None) -> ExperimentConfig:
    """Merge defaults < environment < config file < CLI flags into one validated config"""
    merged: Dict[str, Any] = env_defaults()
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    merged["experiment"] = experiment
    try:
        return ExperimentConfig(**merged)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        kind = "unknown-experiment" if any(err["loc"] == ("experiment",) for err in e.errors()) else "invalid-argument"
        raise VilenkinError(kind, problems)

TOOL_NAME = "vilenkin-lab"
VERSION = "1.0.0"
