from __future__ import annotations

from typing import Tuple

import numpy as np

from src.models.base import BaseDetector, beamform_batch
from src.models.samples import BeamformedVector, SnapshotMatrix
from src.numerics.analytic import lrt_threshold
from src.utils.custom_exception import DomainError


def _check_variance(sigma_sq: float) -> None:
    if not sigma_sq > 0:
        raise DomainError(f"noise variance must be > 0, got {sigma_sq}")


def lrt_statistic(r: BeamformedVector, true_params: Tuple[float, float, float], n_antennas: int) -> float:
    """
    Log-likelihood ratio of the beamformed samples with every parameter known.

    Re R_m and Im R_m are Gaussian with variance N sigma^2 and means (mu_x, mu_y)
    under H1, zero under H0, so

        log LR = [2 sum(mu_x Re r + mu_y Im r) - M (mu_x^2 + mu_y^2)] / (2 N sigma^2).
    """
    mu_x, mu_y, sigma_sq = true_params
    _check_variance(sigma_sq)
    m = r.m_samples
    cross = mu_x * float(np.sum(r.r.real)) + mu_y * float(np.sum(r.r.imag))
    return (2.0 * cross - m * (mu_x ** 2 + mu_y ** 2)) / (2.0 * n_antennas * sigma_sq)


def lrt_deflection_sq(m: int, n_antennas: int, mu_x: float, mu_y: float, sigma_sq: float) -> float:
    """d^2 = M (mu_x^2 + mu_y^2) / (N sigma^2), the variance of the log-ratio."""
    _check_variance(sigma_sq)
    return m * (mu_x ** 2 + mu_y ** 2) / (n_antennas * sigma_sq)


class LrtDetector(BaseDetector):
    """Clairvoyant likelihood ratio test; the SNR-loss reference."""

    name = "lrt"

    def __init__(self, n_antennas: int, m_samples: int, mu_x: float = 0.0, mu_y: float = 0.0, sigma_sq: float = 1.0):
        _check_variance(sigma_sq)
        super().__init__(n_antennas, m_samples, mu_x=mu_x, mu_y=mu_y, sigma_sq=sigma_sq)

    @property
    def true_params(self) -> Tuple[float, float, float]:
        return self.params["mu_x"], self.params["mu_y"], self.params["sigma_sq"]

    def statistic(self, sample: BeamformedVector | SnapshotMatrix) -> float:
        return lrt_statistic(self.prepare(sample), self.true_params, self.n_antennas)

    def batch_statistic(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        mu_x, mu_y, sigma_sq = self.true_params
        r = beamform_batch(x, y)
        m = r.shape[-1]
        cross = mu_x * r.real.sum(axis=-1) + mu_y * r.imag.sum(axis=-1)
        return (2.0 * cross - m * (mu_x ** 2 + mu_y ** 2)) / (2.0 * self.n_antennas * sigma_sq)

    def threshold(self, pfa: float) -> float:
        mu_x, mu_y, sigma_sq = self.true_params
        return lrt_threshold(pfa, lrt_deflection_sq(self.m_samples, self.n_antennas, mu_x, mu_y, sigma_sq))
