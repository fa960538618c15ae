from __future__ import annotations

import numpy as np
from scipy import stats

from src.models.base import BaseDetector, beamform_batch
from src.models.samples import BeamformedVector, SnapshotMatrix
from src.utils.custom_exception import DomainError


def square_law_statistic(r: BeamformedVector) -> float:
    """Energy sum_m |r_m|^2 of the beamformed samples."""
    return float(np.sum(r.r.real ** 2 + r.r.imag ** 2))


def square_law_threshold(pfa: float, m: int, n_antennas: int, sigma_sq: float) -> float:
    """N sigma^2 times the chi-squared (2M dof) inverse survival at `pfa`."""
    if not 0 < pfa <= 1:
        raise DomainError(f"PFA must lie in (0, 1], got {pfa}")
    if not sigma_sq > 0:
        raise DomainError(f"noise variance must be > 0, got {sigma_sq}")
    if pfa == 1:
        return 0.0
    return n_antennas * sigma_sq * float(stats.chi2.isf(pfa, 2 * m))


class SquareLawDetector(BaseDetector):
    """Energy detector with a noise-power-referenced threshold."""

    name = "square_law"

    def __init__(self, n_antennas: int, m_samples: int, sigma_sq: float = 1.0):
        super().__init__(n_antennas, m_samples, sigma_sq=sigma_sq)

    def statistic(self, sample: BeamformedVector | SnapshotMatrix) -> float:
        return square_law_statistic(self.prepare(sample))

    def batch_statistic(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        r = beamform_batch(x, y)
        return np.sum(r.real ** 2 + r.imag ** 2, axis=-1)

    def threshold(self, pfa: float) -> float:
        return square_law_threshold(pfa, self.m_samples, self.n_antennas, self.params["sigma_sq"])
