from pathlib import Path
from typing import Any, Iterable, List, Tuple, Union
import hashlib
import json
import logging
import os
import tempfile

from sympy import isprime

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class TextUtils:
    """Parsing helpers for command-line and configuration values."""

    @staticmethod
    def parse_primes(text: Union[str, Iterable[int]]) -> Tuple[int, ...]:
        """
        Parse a prime list such as ``"31,101"``.

        Args:
            text: Comma separated integers, or an iterable of integers

        Returns:
            Tuple[int, ...]: The primes in the given order, duplicates removed

        Raises:
            ValueError: If an entry is not a prime
        """
        if isinstance(text, str):
            items = [item.strip() for item in text.split(",") if item.strip()]
            values = [int(item) for item in items]
        else:
            values = [int(item) for item in text]
        if not values:
            raise ValueError("at least one prime is required")
        primes: List[int] = []
        for value in values:
            if not isprime(value):
                raise ValueError(f"{value} is not a prime")
            if value not in primes:
                primes.append(value)
        return tuple(primes)

    @staticmethod
    def canonical_text(rows: Iterable[Iterable[str]]) -> str:
        """Rows joined by newlines, entries by commas (checksum input)."""
        return "\n".join(",".join(row) for row in rows)

    @staticmethod
    def sha256(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


class FileUtils:
    """Utility class for file and directory operations."""

    @staticmethod
    def ensure_directory(path: Union[str, Path], parents: bool = True) -> Path:
        """
        Ensure a directory exists, creating it if necessary.

        Args:
            path: Directory path to ensure
            parents: Whether to create parent directories

        Returns:
            Path: Path object pointing to the ensured directory
        """
        try:
            path = Path(path)
            if not path.exists():
                path.mkdir(parents=parents, exist_ok=True)
                logger.info(f"Created directory: {path}")
            return path
        except Exception as e:
            logger.error(f"Failed to ensure directory {path}: {str(e)}")
            raise

    @staticmethod
    def write_json_atomic(path: Union[str, Path], payload: Any) -> Path:
        """
        Write JSON next to its destination, then move it into place.

        Args:
            path: Destination file
            payload: JSON-serializable object

        Returns:
            Path: The written path
        """
        path = Path(path)
        FileUtils.ensure_directory(path.parent)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=False)
                fh.write("\n")
            os.replace(tmp_name, path)
        except Exception as e:
            logger.error(f"Failed to write {path}: {str(e)}")
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.info(f"Wrote {path}")
        return path

    @staticmethod
    def read_json(path: Union[str, Path]) -> Any:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
