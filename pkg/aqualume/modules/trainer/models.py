"""Training configuration document."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from aqualume.errors import ConfigError
from aqualume.modules.losses import LossWeights
from aqualume.utils.documents import dump_document, load_document


class TrainConfig(BaseModel):
    """Optimisation and model settings; YAML keys mirror the field names exactly."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    lr_depth: float = Field(2e-4, ge=0)
    lr_coeff: float = Field(1e-4, ge=0)
    lr_disc: float = Field(1e-4, ge=0)
    decay_start_epoch: int = Field(30, ge=0)
    total_epochs: int = Field(60, ge=0)
    batch_size: int = Field(16, ge=1)
    adam_beta1: float = Field(0.5, ge=0, lt=1)
    adam_beta2: float = Field(0.999, ge=0, lt=1)
    weights: LossWeights = Field(default_factory=LossWeights)
    hyp1: bool = True
    hyp2: bool = True
    seed: int = 0
    pool_size: int = Field(50, ge=0)

    underwater_dir: str | None = None
    terrestrial_dir: str | None = None
    image_size: int = Field(256, ge=8)
    sample_every: int = Field(200, ge=0)
    ngf: int = Field(64, ge=1)
    nef: int = Field(32, ge=1)
    encoder_blocks: int = Field(4, ge=1)
    ndf: int = Field(64, ge=1)
    residual_blocks: int = Field(6, ge=0)
    mask_fraction: float = Field(0.01, gt=0, le=1)
    mask_cap: int = Field(10_000, ge=1)
    perceptual_pretrained: bool = True
    perceptual_both_directions: bool = True
    bhat_on_generated: bool = True
    loader_jobs: int = Field(1, ge=1)
    device: Literal["auto", "cpu", "cuda"] = "auto"

    @model_validator(mode="after")
    def _check_schedule(self) -> TrainConfig:
        if self.total_epochs > 0 and self.decay_start_epoch >= self.total_epochs:
            raise ValueError(
                f"decay_start_epoch ({self.decay_start_epoch}) must be below "
                f"total_epochs ({self.total_epochs})"
            )
        unit = min_image_unit(self.encoder_blocks)
        if self.image_size % unit or self.image_size < 2 * unit:
            raise ValueError(
                f"image_size must be a multiple of {unit} and at least {2 * unit} "
                f"(encoder_blocks={self.encoder_blocks}), got {self.image_size}"
            )
        return self

    @property
    def variant(self) -> str:
        return VARIANT_NAMES[(self.hyp1, self.hyp2)]

    def base_rates(self) -> dict[str, float]:
        return {"depth": self.lr_depth, "coeff": self.lr_coeff, "disc": self.lr_disc}

    def with_overrides(self, **overrides: Any) -> TrainConfig:
        return build_config({**self.model_dump(), **overrides})

    def save(self, path: str | Path) -> Path:
        return dump_document(self.model_dump(mode="json"), path)


def min_image_unit(encoder_blocks: int) -> int:
    """Side length every stride-2 stack must divide.

    The coefficient encoders halve the input ``encoder_blocks`` times and the
    coarse discriminator halves it four times (pooling plus three blocks).
    BatchNorm needs at least a 2x2 map at batch size 1, hence ``2 * unit``
    as the smallest accepted size.
    """
    return 2 ** max(encoder_blocks, 4)


VARIANT_NAMES = {
    (False, False): "baseline",
    (True, False): "hyp1",
    (False, True): "hyp2",
    (True, True): "full",
}


def build_config(data: dict[str, Any]) -> TrainConfig:
    """Validate a mapping; errors name every offending key."""
    try:
        return TrainConfig.model_validate(data)
    except ValidationError as exc:
        keys = sorted({".".join(str(p) for p in err["loc"]) or "<root>" for err in exc.errors()})
        raise ConfigError(f"invalid training config ({', '.join(keys)}): {exc}", keys) from exc


def load_train_config(path: str | Path, **overrides: Any) -> TrainConfig:
    data = load_document(path)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(data)
