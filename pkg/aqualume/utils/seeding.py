from __future__ import annotations

import random

import numpy as np
import torch


def set_seeds(seed: int) -> np.random.Generator:
    """Seed python, numpy and torch; returns the numpy generator all sampling should use."""
    torch.backends.cudnn.deterministic = True
    torch.backends.cudnn.benchmark = False
    torch.manual_seed(seed)
    torch.cuda.manual_seed_all(seed)
    np.random.seed(seed)
    random.seed(seed)
    return np.random.default_rng(seed)
