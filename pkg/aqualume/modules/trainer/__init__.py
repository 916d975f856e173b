from .models import VARIANT_NAMES, TrainConfig, build_config, load_train_config
from .pool import ImagePool
from .schedule import lr_at
from .service import (
    LOG_COLUMNS,
    Trainer,
    TrainingLog,
    ablation_variants,
    build_generator,
    load_generator,
    run,
    verify_checkpoint_digest,
)

__all__ = [
    "LOG_COLUMNS",
    "VARIANT_NAMES",
    "ImagePool",
    "TrainConfig",
    "Trainer",
    "TrainingLog",
    "ablation_variants",
    "build_config",
    "build_generator",
    "load_generator",
    "load_train_config",
    "lr_at",
    "run",
    "verify_checkpoint_digest",
]
