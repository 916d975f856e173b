"""Seeded unpaired batch sampling over the two image domains."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import numpy as np
import torch
from joblib import Parallel, delayed

from aqualume.core.metrics import record_skip
from aqualume.errors import ContractViolation, ImageReadError
from aqualume.modules.imaging import load_image

from .models import UnpairedDataset

logger = logging.getLogger("aqualume.data")

DOMAINS = ("terrestrial", "underwater")


def load_or_skip(path: Path, size: int | None = None) -> torch.Tensor | None:
    """Load an image, or log and count it as skipped when it cannot be decoded."""
    try:
        return load_image(path, size)
    except ImageReadError as exc:
        logger.warning("Skipping unreadable image", extra={"path": str(path), "error": str(exc)})
        record_skip("unreadable")
        return None


class UnpairedBatcher:
    """Draws (x, y) batches without intra-epoch replacement, shuffling each domain on its own.

    One numpy generator drives both permutations; its state is part of
    :meth:`state_dict` so a resumed run sees the same orders. With
    ``jobs > 1`` images are decoded on joblib threads; results keep path order.
    """

    def __init__(
        self,
        dataset: UnpairedDataset,
        batch_size: int,
        rng: np.random.Generator,
        jobs: int = 1,
    ) -> None:
        if batch_size < 1:
            raise ContractViolation(f"batch size must be at least 1, got {batch_size}")
        self.dataset = dataset
        self.batch_size = batch_size
        self.rng = rng
        self.jobs = jobs
        self._paths = {
            "terrestrial": dataset.terrestrial_paths,
            "underwater": dataset.underwater_paths,
        }
        self._orders: dict[str, np.ndarray] = {}
        self._cursors = {domain: 0 for domain in DOMAINS}

    def start_epoch(self) -> None:
        self._orders = {d: self.rng.permutation(len(self._paths[d])) for d in DOMAINS}
        self._cursors = {domain: 0 for domain in DOMAINS}

    def _load(self, paths: list[Path]) -> list[torch.Tensor | None]:
        size = self.dataset.image_size
        if self.jobs > 1 and len(paths) > 1:
            return Parallel(n_jobs=self.jobs, prefer="threads")(
                delayed(load_or_skip)(p, size) for p in paths
            )
        return [load_or_skip(p, size) for p in paths]

    def _take(self, domain: str, n: int) -> torch.Tensor | None:
        order = self._orders[domain]
        paths = self._paths[domain]
        images: list[torch.Tensor] = []
        while len(images) < n:
            cursor = self._cursors[domain]
            wanted = n - len(images)
            if cursor + wanted > len(order):
                self._cursors[domain] = len(order)
                return None
            chunk = [paths[i] for i in order[cursor : cursor + wanted]]
            self._cursors[domain] = cursor + wanted
            images.extend(img for img in self._load(chunk) if img is not None)
        return torch.stack(images)

    def next_batch(self, n: int | None = None) -> tuple[torch.Tensor, torch.Tensor] | None:
        """Next (x terrestrial, y underwater) pair of batches, or None at epoch end."""
        if not self._orders:
            self.start_epoch()
        n = self.batch_size if n is None else n
        if n < 1:
            raise ContractViolation(f"batch size must be at least 1, got {n}")
        x = self._take("terrestrial", n)
        y = self._take("underwater", n)
        if x is None or y is None:
            return None
        return x, y

    def state_dict(self) -> dict[str, Any]:
        return {
            "rng": self.rng.bit_generator.state,
            "orders": {k: v.tolist() for k, v in self._orders.items()},
            "cursors": dict(self._cursors),
        }

    def load_state_dict(self, state: dict[str, Any]) -> None:
        self.rng.bit_generator.state = state["rng"]
        self._orders = {k: np.asarray(v, dtype=np.int64) for k, v in state["orders"].items()}
        self._cursors = dict(state["cursors"])


def next_batch(batcher: UnpairedBatcher, n: int) -> tuple[torch.Tensor, torch.Tensor] | None:
    return batcher.next_batch(n)
