import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional

from ..config.settings import GOLDEN_DIR

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 0.10


@dataclass(frozen=True)
class GoldenCheck:
    name: str
    value: float
    golden: float
    recorded: bool
    passed: bool


class GoldenStore:
 # Regression values stored as one JSON file per name
    def __init__(self, golden_dir: Optional[str] = None):
        self.golden_dir = Path(golden_dir or GOLDEN_DIR)

    def path_for(self, name: str) -> Path:
        return self.golden_dir / f"{name}.json"

    def load(self, name: str) -> Optional[float]:
        path = self.path_for(name)
        if not path.exists():
            return None
        with open(path, "r") as f:
            return float(json.load(f)["value"])

    def record(self, name: str, value: float):
        self.golden_dir.mkdir(parents=True, exist_ok=True)
        payload = {"name": name, "value": value, "recorded_at": datetime.now().isoformat()}
        tmp = self.path_for(name).with_suffix(".tmp")
        with open(tmp, "w") as f:
            json.dump(payload, f, indent=2)
        os.replace(tmp, self.path_for(name))
        logger.info(f"Recorded golden value {name} = {value}")

    def check(self, name: str, value: float, tolerance: float = DEFAULT_TOLERANCE) -> GoldenCheck:
        """Record value on first sight; afterwards it may exceed the golden value by at most tolerance"""
        golden = self.load(name)
        if golden is None:
            self.record(name, value)
            return GoldenCheck(name, value, value, recorded=True, passed=True)

        passed = value <= golden * (1 + tolerance)
        if not passed:
            logger.warning(f"{name} = {value} exceeds golden {golden} by more than {tolerance:.0%}")
        return GoldenCheck(name, value, golden, recorded=False, passed=passed)
