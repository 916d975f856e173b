"""Runtime configuration settings."""

from __future__ import annotations

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables (prefix ``AQUALUME_``).

    Training hyperparameters do not live here; they come from the YAML
    document validated by :class:`aqualume.modules.trainer.models.TrainConfig`.
    """

    model_config = SettingsConfigDict(
        env_prefix="AQUALUME_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Environment
    environment: str = "development"
    log_level: str = "info"

    # Compute
    device: Literal["auto", "cpu", "cuda"] = "auto"
    eval_jobs: int = 1
    loader_jobs: int = 1

    # Observability
    sentry_dsn: str = ""
    metrics_textfile: str = ""

    def resolve_device(self, override: str | None = None) -> str:
        """Pick the torch device string, falling back to CPU without CUDA."""
        import torch

        choice = override or self.device
        if choice == "auto":
            return "cuda" if torch.cuda.is_available() else "cpu"
        return choice


def get_settings() -> Settings:
    """Get runtime settings."""
    return Settings()
