"""Recover constant degradation parameters from a clean/degraded pair with known depth."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch
from scipy import optimize

from aqualume.errors import ContractViolation, FitNotConverged

from .models import VEILING_MAX, VEILING_MIN, DegradationParams, DepthMap

logger = logging.getLogger("aqualume.physics.fitting")

_T_MIN = 1e-6
_BOUNDARY_TOL = 1e-6
_GRID_PIXELS = 2048
_REFINE_PIXELS = 65536


@dataclass(frozen=True)
class FitResult:
    params: DegradationParams
    residual: float
    degenerate: bool = False
    at_boundary: bool = False


def _flatten(t: torch.Tensor) -> np.ndarray:
    return t.detach().cpu().to(torch.float64).numpy().reshape(t.shape[-3], -1)


def _spread(n_total: int, n_keep: int) -> np.ndarray:
    if n_total <= n_keep:
        return np.arange(n_total)
    return np.unique(np.linspace(0, n_total - 1, n_keep).round().astype(np.int64))


def _mse(x: np.ndarray, i: np.ndarray, j: np.ndarray, z: np.ndarray) -> float:
    model = j * x[0] ** z + x[2] * (1.0 - x[1] ** z)
    return float(np.mean((model - i) ** 2))


def _grid_search(i: np.ndarray, j: np.ndarray, z: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Best (t_d, t_b, b_inf) on a (t_d, t_b) lattice with b_inf solved in closed form."""
    direct = grid[:, None] ** z[None, :]  # (G, P)
    basis = 1.0 - direct  # backscatter basis shares the lattice
    remainder = i[None, :] - j[None, :] * direct  # per t_d
    num = remainder @ basis.T  # (G_td, G_tb)
    den = np.einsum("gp,gp->g", basis, basis)[None, :]
    safe_den = np.where(den > 0, den, 1.0)
    b_inf = np.clip(np.where(den > 0, num / safe_den, 0.8), VEILING_MIN, VEILING_MAX)
    sse = (remainder**2).sum(axis=1)[:, None] - 2.0 * b_inf * num + b_inf**2 * den
    a, b = np.unravel_index(np.argmin(sse), sse.shape)
    return np.array([grid[a], grid[b], b_inf[a, b]])


def _refine(i: np.ndarray, j: np.ndarray, z: np.ndarray, x0: np.ndarray) -> np.ndarray:
    def residuals(x: np.ndarray) -> np.ndarray:
        t_d, t_b, b_inf = x
        return j * t_d**z + b_inf * (1.0 - t_b**z) - i

    def jacobian(x: np.ndarray) -> np.ndarray:
        t_d, t_b, b_inf = x
        positive = z > 0
        d_td = np.where(positive, j * z * t_d ** np.where(positive, z - 1.0, 0.0), 0.0)
        d_tb = np.where(positive, -b_inf * z * t_b ** np.where(positive, z - 1.0, 0.0), 0.0)
        d_b = 1.0 - t_b**z
        return np.stack([d_td, d_tb, d_b], axis=1)

    lower = np.array([_T_MIN, _T_MIN, VEILING_MIN])
    upper = np.array([1.0, 1.0, VEILING_MAX])
    result = optimize.least_squares(
        residuals,
        np.clip(x0, lower, upper),
        jac=jacobian,
        bounds=(lower, upper),
        method="trf",
        ftol=1e-15,
        xtol=1e-15,
        gtol=1e-15,
        max_nfev=500,
    )
    return result.x


def fit_constant_params(
    I: torch.Tensor,  # noqa: E741
    J: torch.Tensor,
    z: DepthMap,
    residual_threshold: float = 1e-6,
    grid_size: int = 41,
) -> FitResult:
    """Fit per-channel (t_D, t_B, B_inf) minimising the mean squared formation residual.

    Zero depth leaves the coefficients unidentifiable: the result is flagged
    ``degenerate`` and carries midpoint parameters. Solutions with t_D or t_B on
    the closed boundary {0, 1} are flagged ``at_boundary``.

    Raises:
        FitNotConverged: residual above ``residual_threshold`` on a non-degenerate input.
    """
    if I.shape[-3:] != J.shape[-3:] or I.shape[-3] != 3:
        raise ContractViolation(f"image shapes differ: {tuple(I.shape)} vs {tuple(J.shape)}")
    if z.shape[-2:] != I.shape[-2:]:
        raise ContractViolation("depth and image sizes differ")

    i_all, j_all = _flatten(I), _flatten(J)
    z_all = _flatten(z)[0]

    if float(np.abs(z_all).max()) < 1e-12:
        residual = float(np.mean((i_all - j_all) ** 2))
        logger.info("Zero depth: coefficients unidentifiable", extra={"residual": residual})
        params = DegradationParams.from_triples((0.5,) * 3, (0.5,) * 3, (0.8,) * 3)
        if residual > residual_threshold:
            raise FitNotConverged(residual, residual_threshold)
        return FitResult(params=params, residual=residual, degenerate=True)

    grid = np.linspace(0.01, 1.0, grid_size)
    fitted = np.zeros((3, 3))
    residuals = []
    for c in range(3):
        # pixels clamped at 1 no longer follow the formation model
        keep = np.flatnonzero(i_all[c] < 1.0)
        if keep.size == 0:
            keep = np.arange(z_all.size)
        i_c, j_c, z_c = i_all[c, keep], j_all[c, keep], z_all[keep]
        coarse = _spread(keep.size, _GRID_PIXELS)
        fine = _spread(keep.size, _REFINE_PIXELS)
        x0 = _grid_search(i_c[coarse], j_c[coarse], z_c[coarse], grid)
        refined = _refine(i_c[fine], j_c[fine], z_c[fine], x0)
        x, mse = min(
            ((cand, _mse(cand, i_c, j_c, z_c)) for cand in (refined, x0)), key=lambda t: t[1]
        )
        fitted[:, c] = x
        residuals.append(mse)

    residual = float(np.mean(residuals))
    transmissions = fitted[:2]
    at_boundary = bool(
        np.any(transmissions >= 1.0 - _BOUNDARY_TOL) or np.any(transmissions <= _BOUNDARY_TOL)
    )
    params = DegradationParams.from_triples(
        tuple(fitted[0]), tuple(fitted[1]), tuple(fitted[2]), dtype=torch.float64
    )
    if residual > residual_threshold:
        raise FitNotConverged(residual, residual_threshold)
    if at_boundary:
        logger.warning("Fit reached the transmission boundary", extra={"residual": residual})
    return FitResult(params=params, residual=residual, at_boundary=at_boundary)
