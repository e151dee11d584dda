import os
import logging
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Load environment variables from .env file
# Search for .env in the project root (parent of the supergrass package)
env_path = Path(__file__).parent.parent.parent / ".env"
if env_path.exists():
    load_dotenv(dotenv_path=env_path)
    logger.debug(f"Loaded environment variables from {env_path}")
else:
    # Try loading from current directory
    load_dotenv()


class Settings:
    """Application configuration settings"""

    def __init__(self):
        # Exact linear algebra limits
        self.max_cells = int(os.getenv("SUPERGRASS_MAX_CELLS", 4_000_000))

        # Koszul oracle desk-scale limits
        self.oracle_max_vars = int(os.getenv("SUPERGRASS_ORACLE_MAX_VARS", 12))
        self.oracle_max_degree = int(os.getenv("SUPERGRASS_ORACLE_MAX_DEGREE", 10))

        # Parallel paths (opt-in from the CLI)
        self.parallel = os.getenv("SUPERGRASS_PARALLEL", "false").lower() == "true"
        self.workers = int(os.getenv("SUPERGRASS_WORKERS", os.cpu_count() or 1))

        # Randomized checks
        self.seed = int(os.getenv("SUPERGRASS_SEED", 0))
        self.trials = int(os.getenv("SUPERGRASS_TRIALS", 100))

        # Primes used for the modular rank cross-check
        self.check_primes = [
            int(p) for p in os.getenv("SUPERGRASS_CHECK_PRIMES", "32003,65537").split(",") if p.strip()
        ]

        self.log_level = os.getenv("SUPERGRASS_LOG_LEVEL", "WARNING").upper()

    def override(self, **values) -> "Settings":
        """Apply per-run overrides (CLI flags); None values are ignored"""
        for key, value in values.items():
            if value is None:
                continue
            if not hasattr(self, key):
                raise AttributeError(f"Unknown setting: {key}")
            setattr(self, key, value)
        return self


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get or create global settings instance"""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next get_settings() re-reads the environment"""
    global _settings
    _settings = None
