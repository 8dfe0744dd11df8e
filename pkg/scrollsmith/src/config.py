from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union
import logging
import os

import yaml
from dotenv import load_dotenv

from scrollsmith.src.utils import TextUtils

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ENV_PREFIX = "SCROLLSMITH_"


@dataclass
class RunConfig:
    """
    Configuration shared by every pipeline stage.

    Attributes:
        primes (Tuple[int, ...]): Verification primes
        seed (int): Seed for numpy's default generator
        retry_budget (int): Attempts per randomized construction stage
        cubic_search_budget (int): Random combinations tried when searching cubics
        prescan_limit (int): Largest projective space scanned point by point
        threads (int): Worker cap for seed sweeps
        exact_clearance (bool): Also certify tangent clearance over the algebraic closure
        progress (bool): Show progress bars
        output_format (str): "json" or "text"
        log_level (str): Root logging level
    """
    primes: Tuple[int, ...] = (31,)
    seed: int = 0
    retry_budget: int = 100
    cubic_search_budget: int = 200
    prescan_limit: int = 2_000_000
    threads: int = 1
    exact_clearance: bool = False
    progress: bool = False
    output_format: str = "json"
    log_level: str = "INFO"

    def __post_init__(self):
        self.primes = TextUtils.parse_primes(self.primes)
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.retry_budget <= 0:
            raise ValueError("retry_budget must be positive")
        if self.cubic_search_budget < 0:
            raise ValueError("cubic_search_budget must be non-negative")
        if self.prescan_limit < 0:
            raise ValueError("prescan_limit must be non-negative")
        if self.threads <= 0:
            raise ValueError("threads must be positive")
        if self.output_format not in ("json", "text"):
            raise ValueError("output_format must be 'json' or 'text'")
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            raise ValueError(f"unknown log level {self.log_level}")
        self.log_level = self.log_level.upper()

    def to_dict(self) -> Dict[str, Any]:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["primes"] = list(self.primes)
        return data


_ENV_FIELDS = {
    "THREADS": ("threads", int),
    "PRIMES": ("primes", TextUtils.parse_primes),
    "SEED": ("seed", int),
    "LOG_LEVEL": ("log_level", str),
}


def _from_environment() -> Dict[str, Any]:
    values = {}
    for suffix, (name, convert) in _ENV_FIELDS.items():
        raw = os.environ.get(ENV_PREFIX + suffix)
        if raw:
            try:
                values[name] = convert(raw)
            except ValueError as e:
                logger.error(f"Invalid {ENV_PREFIX + suffix}={raw!r}: {e}")
                raise
    return values


def _from_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path} must hold a mapping")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown configuration keys in {path}: {sorted(unknown)}")
    return data


def load_config(path: Optional[Union[str, Path]] = None, **overrides: Any) -> RunConfig:
    """
    Resolve a RunConfig from .env, SCROLLSMITH_* variables, a YAML file and overrides.

    Later sources win; overrides set to None are ignored.
    """
    load_dotenv()
    values: Dict[str, Any] = {}
    values.update(_from_environment())
    if path is not None:
        values.update(_from_yaml(path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    config = RunConfig(**values)
    logging.getLogger().setLevel(config.log_level)
    logger.debug(f"Resolved configuration: {config.to_dict()}")
    return config
