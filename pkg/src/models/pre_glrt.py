from __future__ import annotations

import numpy as np

from src.models.base import BaseDetector
from src.models.samples import SnapshotMatrix
from src.numerics.analytic import pre_glrt_threshold
from src.utils.custom_exception import DegenerateSample, DomainError


def _pre_glrt_parts(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean energy M sum_n |mu_n|^2 and pooled residual sum over (..., N, M) arrays."""
    m = x.shape[-1]
    mean_x = x.mean(axis=-1, keepdims=True)
    mean_y = y.mean(axis=-1, keepdims=True)
    energy = m * np.sum(mean_x[..., 0] ** 2 + mean_y[..., 0] ** 2, axis=-1)
    residual = np.sum((x - mean_x) ** 2 + (y - mean_y) ** 2, axis=(-2, -1))
    return energy, residual


def pre_glrt_statistic(s: SnapshotMatrix, noise_floor_guard: float = 0.0) -> float:
    """
    GLRT over N channels with per-antenna unknown means and a shared unknown variance.

    T = [M sum_n |mu_n|^2 / (2N)] / [sum_{n,m} |s_nm - mu_n|^2 / (2N(M-1))],
    which is F(2N, 2N(M-1)) distributed under H0 for any noise variance.

    Raises
    ------
    DegenerateSample
        If the pooled residual does not exceed `noise_floor_guard`.
    """
    if noise_floor_guard < 0:
        raise DomainError(f"noise floor guard must be >= 0, got {noise_floor_guard}")
    n, m = s.n_antennas, s.m_samples
    energy, residual = _pre_glrt_parts(s.x, s.y)
    if not residual > noise_floor_guard:
        raise DegenerateSample("pooled residual variance is zero")
    return float((energy / (2 * n)) / (residual / (2 * n * (m - 1))))


class PreGlrtDetector(BaseDetector):
    """Per-antenna GLRT run before beamforming."""

    name = "pre_glrt"
    uses_snapshot = True

    def __init__(self, n_antennas: int, m_samples: int, noise_floor_guard: float = 0.0):
        super().__init__(n_antennas, m_samples, noise_floor_guard=noise_floor_guard)

    def statistic(self, sample: SnapshotMatrix) -> float:
        if not isinstance(sample, SnapshotMatrix):
            raise DomainError("pre-beamforming GLRT needs the per-antenna snapshot")
        return pre_glrt_statistic(sample, self.params["noise_floor_guard"])

    def batch_statistic(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n, m = x.shape[-2], x.shape[-1]
        energy, residual = _pre_glrt_parts(x, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (m - 1) * energy / residual
        return np.where(residual > self.params["noise_floor_guard"], t, np.nan)

    def threshold(self, pfa: float) -> float:
        return pre_glrt_threshold(pfa, self.n_antennas, self.m_samples)
