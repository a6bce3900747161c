"""Environment settings for the experiment runner.

Uses pydantic-settings when available for .env file loading and type
validation. Falls back to a plain class with os.getenv() when
pydantic-settings is not installed (e.g., system Python).
"""

import os
from pathlib import Path

try:
    from pydantic_settings import BaseSettings

    class Settings(BaseSettings):
        # Worker threads for stepping the team; 0 = one per roster member
        mmo_threads: int = 0

        # Root of results/<subcommand>/<name>/
        mmo_results_dir: str = "results"

        # UCI files for the dataset tests and the svm defaults
        mmo_bcw_path: str = ""
        mmo_is_path: str = ""

        model_config = {
            "env_file": str(Path(__file__).resolve().parent.parent / ".env"),
            "extra": "ignore",
        }

except ImportError:
    # Fallback: read from env vars with same defaults (no .env file loading)
    class Settings:  # type: ignore[no-redef]
        def __init__(self):
            self.mmo_threads = int(os.getenv("MMO_THREADS", "0"))
            self.mmo_results_dir = os.getenv("MMO_RESULTS_DIR", "results")
            self.mmo_bcw_path = os.getenv("MMO_BCW_PATH", "")
            self.mmo_is_path = os.getenv("MMO_IS_PATH", "")


settings = Settings()
