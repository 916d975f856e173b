"""Versioned training checkpoint archive."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import torch

from aqualume.errors import CheckpointError
from aqualume.utils.storage import atomic_write

logger = logging.getLogger("aqualume.networks.checkpoint")

FORMAT_VERSION = 1
REQUIRED_KEYS = (
    "format_version",
    "epoch",
    "iteration",
    "config",
    "generators",
    "discriminators",
    "optimizers",
)


def save_checkpoint(payload: dict[str, Any], path: str | Path) -> Path:
    """Write atomically so an interrupted save leaves the previous file intact."""
    archive = {"format_version": FORMAT_VERSION, **payload}
    missing = [key for key in REQUIRED_KEYS if key not in archive]
    if missing:
        raise CheckpointError(f"checkpoint payload lacks {missing}")
    written = atomic_write(path, lambda tmp: torch.save(archive, tmp))
    logger.info("Checkpoint written", extra={"path": str(written), "epoch": archive["epoch"]})
    return written


def load_checkpoint(path: str | Path, map_location: str | torch.device = "cpu") -> dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        # Archives hold RNG states and config dictionaries, not just tensors.
        archive = torch.load(path, map_location=map_location, weights_only=False)
    except Exception as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(archive, dict) or archive.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint format")
    missing = [key for key in REQUIRED_KEYS if key not in archive]
    if missing:
        raise CheckpointError(f"{path}: checkpoint lacks {missing}")
    return archive
