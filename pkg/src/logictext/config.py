"""Configuration management for the logictext toolkit."""

import os
import string
from pathlib import Path

from logictext.exceptions import ConfigurationError

DEFAULT_SEED = 20220
DEFAULT_TYPE_THRESHOLD = 0.8
DEFAULT_PROMPT = "Describe the logical form: "


class Config:
    """Configuration for the logictext toolkit."""

    def __init__(self, lexicon_path: Path | None = None, seed: int | None = None):
        """
        Initialize configuration.

        Args:
            lexicon_path: Optional BLEC lexicon file. If not provided, the
                         LOGICTEXT_LEXICON variable or the packaged lexicon is used.
            seed: Optional default seed for randomized commands.
        """
        self._lexicon_path = lexicon_path
        self._seed = seed

    @property
    def package_dir(self) -> Path:
        """Get the installed package directory."""
        return Path(__file__).parent

    @property
    def lexicon_path(self) -> Path:
        """Get the BLEC keyword lexicon path."""
        if self._lexicon_path is not None:
            return self._lexicon_path

        env_path = os.getenv("LOGICTEXT_LEXICON")
        if env_path:
            return Path(env_path)

        return self.package_dir / "data" / "blec_lexicon.json"

    @property
    def default_seed(self) -> int:
        """Get the seed used when a command is run without --seed."""
        if self._seed is not None:
            return self._seed

        raw = os.getenv("LOGICTEXT_SEED")
        if not raw:
            return DEFAULT_SEED
        try:
            seed = int(raw)
        except ValueError:
            raise ConfigurationError(f"LOGICTEXT_SEED must be an integer, got {raw!r}")
        if not 0 <= seed < 2**64:
            raise ConfigurationError(f"LOGICTEXT_SEED out of 64-bit range: {seed}")
        return seed

    @property
    def type_threshold(self) -> float:
        """Get the share of cells a column needs to be classified as time or number."""
        raw = os.getenv("LOGICTEXT_TYPE_THRESHOLD")
        if not raw:
            return DEFAULT_TYPE_THRESHOLD
        try:
            threshold = float(raw)
        except ValueError:
            raise ConfigurationError(f"LOGICTEXT_TYPE_THRESHOLD must be a number, got {raw!r}")
        if not 0.0 < threshold <= 1.0:
            raise ConfigurationError(f"LOGICTEXT_TYPE_THRESHOLD must be in (0, 1], got {threshold}")
        return threshold

    @property
    def prompt_prefix(self) -> str:
        """Get the prefix prompt P of model inputs."""
        return os.getenv("LOGICTEXT_PROMPT") or DEFAULT_PROMPT

    @property
    def random_alphabet(self) -> str:
        """Get the alphabet of random replacement strings."""
        return string.ascii_lowercase + string.digits

    @property
    def random_length(self) -> tuple[int, int]:
        """Get the inclusive length range of random replacement strings."""
        return 6, 12


# Global default config
default_config = Config()
