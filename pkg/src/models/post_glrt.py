from __future__ import annotations

import numpy as np

from src.models.base import BaseDetector, beamform_batch
from src.models.mle import mle_estimates
from src.models.samples import BeamformedVector, SnapshotMatrix
from src.numerics.analytic import threshold_for_pfa


def post_glrt_statistic(r: BeamformedVector, n_antennas: int) -> float:
    """
    Z = Psi (mu_x^2 + mu_y^2) / sigma1^2 with Psi = (M-1)/(2N).

    Raises
    ------
    DegenerateSample
        Propagated from `mle_estimates`.
    """
    mle = mle_estimates(r, n_antennas)
    psi = (r.m_samples - 1) / (2.0 * n_antennas)
    return psi * (mle.mu_x_hat ** 2 + mle.mu_y_hat ** 2) / mle.sigma1_sq_hat


class PostGlrtDetector(BaseDetector):
    """GLRT on the beamformed samples with unknown mean and noise variance."""

    name = "post_glrt"

    def statistic(self, sample: BeamformedVector | SnapshotMatrix) -> float:
        return post_glrt_statistic(self.prepare(sample), self.n_antennas)

    def batch_statistic(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        r = beamform_batch(x, y)
        m = r.shape[-1]
        mean = r.mean(axis=-1)
        # N cancels between Psi and sigma1^2
        residual = np.sum(np.abs(r - mean[..., None]) ** 2, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (m - 1) * m * np.abs(mean) ** 2 / residual
        return np.where(residual > 0, z, np.nan)

    def threshold(self, pfa: float) -> float:
        return threshold_for_pfa(pfa, self.m_samples)
