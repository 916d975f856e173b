"""Metric result records."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

UCIQE_WEIGHTS = (0.4680, 0.2745, 0.2576)


@dataclass(frozen=True)
class UciqeBreakdown:
    sigma_c: float
    con_l: float
    mu_s: float
    uciqe: float

    @classmethod
    def combine(cls, sigma_c: float, con_l: float, mu_s: float) -> UciqeBreakdown:
        w_c, w_l, w_s = UCIQE_WEIGHTS
        return cls(sigma_c, con_l, mu_s, w_c * sigma_c + w_l * con_l + w_s * mu_s)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class LabUBreakdown:
    """Colour-distribution index; lower ``u`` is better.

    ``degenerate`` marks images whose a/b span or mean lightness had to be
    floored to keep ``u`` finite.
    """

    d_o: float
    d_a: float
    d_b: float
    a_l: float
    u: float
    degenerate: bool = False

    def as_dict(self) -> dict[str, float]:
        return {k: float(v) for k, v in asdict(self).items() if k != "degenerate"}


class FeatureCounts(NamedTuple):
    sift: int
    harris: int
