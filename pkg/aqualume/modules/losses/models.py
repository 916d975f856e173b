"""Loss weights and per-iteration loss reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from pydantic import BaseModel, ConfigDict, Field


class LossWeights(BaseModel):
    """Generator objective weights; defaults are the reference values."""

    model_config = ConfigDict(extra="forbid")

    lambda_g: float = Field(3.0, ge=0)
    lambda_c: float = Field(4.0, ge=0)
    lambda_p: float = Field(0.1, ge=0)
    lambda_B: float = Field(2.0, ge=0)


@dataclass(frozen=True)
class LossReport:
    l_g: float
    l_d: float
    l_cycle: float
    l_perc: float
    l_bhat: float
    total: float

    FIELDS = ("l_g", "l_d", "l_cycle", "l_perc", "l_bhat", "total")

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in asdict(self).values())

    def as_dict(self) -> dict[str, float]:
        return asdict(self)
