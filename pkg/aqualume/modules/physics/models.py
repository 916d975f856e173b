"""Degradation parameter containers."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import NamedTuple, TypeAlias

import torch

from aqualume.errors import ConfigError, ContractViolation

# (..., 1, H, W), meters, values in [0, 6]
DepthMap: TypeAlias = torch.Tensor

VEILING_MIN = 0.6
VEILING_MAX = 1.0

PARAM_KEYS = (
    "t_d_r",
    "t_d_g",
    "t_d_b",
    "t_b_r",
    "t_b_g",
    "t_b_b",
    "b_inf_r",
    "b_inf_g",
    "b_inf_b",
)


class ChannelTriple(NamedTuple):
    r: float
    g: float
    b: float

    def as_tensor(self, dtype: torch.dtype = torch.float32) -> torch.Tensor:
        """(3, 1, 1) tensor broadcastable over an image."""
        return torch.tensor([self.r, self.g, self.b], dtype=dtype).view(3, 1, 1)

    @classmethod
    def from_tensor(cls, values: torch.Tensor) -> ChannelTriple:
        flat = values.detach().reshape(-1).tolist()
        if len(flat) != 3:
            raise ContractViolation(f"expected 3 channel values, got {len(flat)}")
        return cls(*(float(v) for v in flat))


@dataclass(frozen=True)
class DegradationParams:
    """Per-image, per-channel water-body style.

    ``t_d`` and ``t_b`` are per-unit-depth transmissions e^-beta for the direct
    signal and the backscatter; ``b_inf`` is the veiling light. Each tensor is
    shaped (3, 1, 1) for one image or (N, 3, 1, 1) for a batch.
    """

    t_d: torch.Tensor
    t_b: torch.Tensor
    b_inf: torch.Tensor

    def __post_init__(self) -> None:
        for name in ("t_d", "t_b", "b_inf"):
            value = getattr(self, name)
            if value.dim() < 3 or tuple(value.shape[-3:]) != (3, 1, 1):
                raise ContractViolation(
                    f"{name} must be shaped (..., 3, 1, 1), got {tuple(value.shape)}"
                )

    @classmethod
    def from_triples(
        cls,
        t_d: ChannelTriple | tuple[float, float, float],
        t_b: ChannelTriple | tuple[float, float, float],
        b_inf: ChannelTriple | tuple[float, float, float],
        dtype: torch.dtype = torch.float32,
    ) -> DegradationParams:
        return cls(
            t_d=ChannelTriple(*t_d).as_tensor(dtype),
            t_b=ChannelTriple(*t_b).as_tensor(dtype),
            b_inf=ChannelTriple(*b_inf).as_tensor(dtype),
        )

    @property
    def beta_d(self) -> torch.Tensor:
        return -torch.log(self.t_d)

    @property
    def beta_b(self) -> torch.Tensor:
        return -torch.log(self.t_b)

    @property
    def batch_size(self) -> int | None:
        return self.t_d.shape[0] if self.t_d.dim() == 4 else None

    def select(self, index: int) -> DegradationParams:
        if self.t_d.dim() != 4:
            return self
        return DegradationParams(self.t_d[index], self.t_b[index], self.b_inf[index])

    def detach(self) -> DegradationParams:
        return DegradationParams(self.t_d.detach(), self.t_b.detach(), self.b_inf.detach())

    def to(self, *args, **kwargs) -> DegradationParams:
        return DegradationParams(
            self.t_d.to(*args, **kwargs),
            self.t_b.to(*args, **kwargs),
            self.b_inf.to(*args, **kwargs),
        )

    def triples(self) -> tuple[ChannelTriple, ChannelTriple, ChannelTriple]:
        single = self.select(0)
        return (
            ChannelTriple.from_tensor(single.t_d),
            ChannelTriple.from_tensor(single.t_b),
            ChannelTriple.from_tensor(single.b_inf),
        )

    def validate(self) -> list[str]:
        """Human-readable range violations; empty when all invariants hold."""
        violations: list[str] = []
        names = ("r", "g", "b")
        for prefix, triple in zip(("t_d", "t_b", "b_inf"), self.triples(), strict=True):
            for channel, value in zip(names, triple, strict=True):
                key = f"{prefix}_{channel}"
                if not math.isfinite(value):
                    violations.append(f"{key}={value} is not finite")
                elif prefix == "b_inf" and not VEILING_MIN <= value <= VEILING_MAX:
                    violations.append(f"{key}={value} outside [{VEILING_MIN}, {VEILING_MAX}]")
                elif prefix != "b_inf" and not 0.0 < value < 1.0:
                    violations.append(f"{key}={value} outside (0, 1)")
        return violations

    def to_document(self) -> dict[str, float]:
        values = [v for triple in self.triples() for v in triple]
        return dict(zip(PARAM_KEYS, values, strict=True))

    @classmethod
    def from_document(
        cls, doc: Mapping[str, object], dtype: torch.dtype = torch.float32
    ) -> DegradationParams:
        missing = [key for key in PARAM_KEYS if key not in doc]
        unknown = [key for key in doc if key not in PARAM_KEYS]
        if missing or unknown:
            raise ConfigError(
                f"parameter document: missing {missing}, unknown {unknown}", missing + unknown
            )
        try:
            values = [float(doc[key]) for key in PARAM_KEYS]  # type: ignore[arg-type]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"parameter document: non-numeric value ({exc})") from exc
        return cls.from_triples(values[0:3], values[3:6], values[6:9], dtype=dtype)
