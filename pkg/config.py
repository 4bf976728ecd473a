"""
Config Module
Runtime settings for the januarial engines, read from the environment.
"""

import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional

logger = logging.getLogger(__name__)

PACKAGE_DIR = Path(__file__).resolve().parent


def _default_cache_dir() -> Path:
    return PACKAGE_DIR / "data"


@dataclass(frozen=True)
class Settings:
    """
    Tunable limits and locations.

    Defaults live here as class-level values; the CLI overrides single
    fields with ``dataclasses.replace``.
    """

    # Environment variables
    CACHE_ENV = "JANUARIAL_CACHE"
    WORKERS_ENV = "JANUARIAL_WORKERS"

    WITNESS_FILE = "odd_witnesses.txt"

    cache_dir: Path = field(default_factory=_default_cache_dir)
    workers: int = 1
    census_max_solutions: int = 8
    odd_search_max_candidates: int = 200_000
    # candidates are four-transposition rings; any value >= 4 admits all of them
    odd_search_max_transpositions: int = 4

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """
        Build settings from environment variables.

        Args:
            environ: Mapping to read instead of ``os.environ``.

        Returns:
            Settings with any recognised variables applied.
        """
        env = os.environ if environ is None else environ
        settings = cls()

        cache = env.get(cls.CACHE_ENV)
        if cache:
            settings = replace(settings, cache_dir=Path(cache).expanduser())

        workers = env.get(cls.WORKERS_ENV)
        if workers:
            try:
                settings = replace(settings, workers=max(1, int(workers)))
            except ValueError:
                logger.warning("ignoring %s=%r: not an integer", cls.WORKERS_ENV, workers)

        return settings

    @property
    def witness_path(self) -> Path:
        """Path of the odd-family witness cache."""
        return self.cache_dir / self.WITNESS_FILE
