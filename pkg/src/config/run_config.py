"""TOML run configuration for the experiment commands"""
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..errors import ConfigError
from ..experiments.spec import ExperimentSpec
from ..utils.report import FORMATS
from .settings import SEED, WORKERS

logger = logging.getLogger(__name__)

RUN_KEYS = ("command", "cache_dir", "workers", "seed", "golden_dir")
OUTPUT_KEYS = ("format", "path")
DECAY_KEYS = ("ladder",)
TABLES = ("run", "output", "experiment", "decay")


@dataclass
class RunConfig:
    experiment: ExperimentSpec
    command: str = "run"
    cache_dir: Optional[str] = None
    workers: int = WORKERS
    seed: int = SEED
    golden_dir: Optional[str] = None
    output_format: str = "json"
    output_path: Optional[str] = None
    ladder: List[int] = field(default_factory=list)

    def validate(self):
        if self.command not in ("run", "decay"):
            raise ConfigError(f"run.command must be 'run' or 'decay', got {self.command!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"run.workers must be a positive integer, got {self.workers!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"run.seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}, got {self.output_format!r}")
        if any(not isinstance(Y, int) or Y < 2 for Y in self.ladder):
            raise ConfigError(f"decay.ladder must hold integers >= 2, got {self.ladder!r}")
        if self.command == "decay" and not self.ladder:
            raise ConfigError("decay runs need a non-empty decay.ladder")
        problems = self.experiment.range_errors()
        if problems:
            raise ConfigError(f"[experiment]: {'; '.join(problems)}")
        return self

    def override(self, **values) -> "RunConfig":
        """Copy with every non-None value applied"""
        return replace(self, **{k: v for k, v in values.items() if v is not None}).validate()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run": {"command": self.command, "cache_dir": self.cache_dir, "workers": self.workers,
                    "seed": self.seed, "golden_dir": self.golden_dir},
            "output": {"format": self.output_format, "path": self.output_path},
            "experiment": self.experiment.to_dict(),
            "decay": {"ladder": list(self.ladder)},
        }


def _table(data: Dict[str, Any], name: str, allowed: tuple) -> Dict[str, Any]:
    table = data.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = set(table) - set(allowed)
    if unknown:
        raise ConfigError(f"Unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    return table


def parse_run_config(data: Dict[str, Any]) -> RunConfig:
    """Build a RunConfig from already-parsed TOML tables"""
    unknown = set(data) - set(TABLES)
    if unknown:
        raise ConfigError(f"Unknown table(s): {', '.join(sorted(unknown))}")
    if "experiment" not in data:
        raise ConfigError("Config needs an [experiment] table")

    run = _table(data, "run", RUN_KEYS)
    output = _table(data, "output", OUTPUT_KEYS)
    decay = _table(data, "decay", DECAY_KEYS)
    experiment = dict(_table(data, "experiment", ExperimentSpec.field_names()))
    experiment.setdefault("seed", run.get("seed", SEED))

    try:
        spec = ExperimentSpec.from_dict(experiment)
    except TypeError as e:
        raise ConfigError(f"[experiment]: {e}")

    config = RunConfig(
        experiment=spec,
        command=run.get("command", "run"),
        cache_dir=run.get("cache_dir"),
        workers=run.get("workers", WORKERS),
        seed=run.get("seed", SEED),
        golden_dir=run.get("golden_dir"),
        output_format=output.get("format", "json"),
        output_path=output.get("path"),
        ladder=list(decay.get("ladder", [])),
    )
    return config.validate()


def load_run_config(path: str) -> RunConfig:
    """Read and validate a TOML run configuration"""
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")
    try:
        with open(config_path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        logger.error(f"Could not parse {config_path}: {e}")
        raise ConfigError(f"{config_path}: {e}")

    logger.info(f"Loaded run configuration from {config_path}")
    return parse_run_config(data)
