"""Generator outputs."""

from __future__ import annotations

from dataclasses import dataclass

import torch

from aqualume.modules.physics import DegradationParams, DepthMap


@dataclass(frozen=True)
class Decomposition:
    """Scene depth plus the degradation parameters one generator reads from an image."""

    depth: DepthMap
    params: DegradationParams

    def detach(self) -> Decomposition:
        return Decomposition(self.depth.detach(), self.params.detach())

    def select(self, index: int) -> Decomposition:
        depth = self.depth[index] if self.depth.dim() == 4 else self.depth
        return Decomposition(depth, self.params.select(index))

    def stats(self) -> dict[str, float]:
        """Scalar summary used in logs and non-finite-loss diagnostics."""
        with torch.no_grad():
            depth = self.depth.float()
            summary = {
                "depth_mean": float(depth.mean()),
                "depth_std": float(depth.std()) if depth.numel() > 1 else 0.0,
                "depth_min": float(depth.min()),
                "depth_max": float(depth.max()),
            }
            for name, value in (
                ("t_d", self.params.t_d),
                ("t_b", self.params.t_b),
                ("b_inf", self.params.b_inf),
            ):
                per_channel = value.float().reshape(-1, 3).mean(dim=0)
                for channel, v in zip("rgb", per_channel.tolist(), strict=True):
                    summary[f"{name}_{channel}"] = v
        return summary

    def violations(self) -> list[str]:
        """Range invariants that do not hold (empty for a valid decomposition)."""
        problems: list[str] = []
        with torch.no_grad():
            if not torch.isfinite(self.depth).all():
                problems.append("depth has non-finite values")
            elif self.depth.min() < 0 or self.depth.max() > 6:
                problems.append("depth outside [0, 6]")
            for name in ("t_d", "t_b"):
                value = getattr(self.params, name)
                if not ((value > 0) & (value < 1)).all():
                    problems.append(f"{name} outside (0, 1)")
            b_inf = self.params.b_inf
            if not ((b_inf >= 0.6) & (b_inf <= 1.0)).all():
                problems.append("b_inf outside [0.6, 1]")
        return problems
