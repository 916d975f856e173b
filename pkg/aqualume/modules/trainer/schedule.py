from __future__ import annotations

from aqualume.errors import ContractViolation

from .models import TrainConfig


def lr_at(epoch: int, cfg: TrainConfig, base: float) -> float:
    """Constant until ``decay_start_epoch``, then linear down to 0 at ``total_epochs``."""
    if epoch < 0 or (cfg.total_epochs > 0 and epoch > cfg.total_epochs):
        raise ContractViolation(f"epoch {epoch} outside [0, {cfg.total_epochs}]")
    if epoch < cfg.decay_start_epoch:
        return base
    span = cfg.total_epochs - cfg.decay_start_epoch
    if span <= 0:
        return base
    return base * (cfg.total_epochs - epoch) / span
