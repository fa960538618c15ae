"""Maximum-likelihood estimates of the beamformed echo mean and noise variance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.models.samples import BeamformedVector
from src.utils.custom_exception import DegenerateSample, DomainError


@dataclass(frozen=True)
class MleSet:
    mu_x_hat: float
    mu_y_hat: float
    sigma0_sq_hat: float
    sigma1_sq_hat: float


def mle_estimates(r: BeamformedVector, n_antennas: int) -> MleSet:
    """
    MLEs under both hypotheses.

    mu_x = mean(Re r), mu_y = mean(Im r),
    sigma0^2 = sum |r|^2 / (2MN),
    sigma1^2 = sum |r - mu|^2 / (2MN).

    Raises
    ------
    DegenerateSample
        If the residual variance sigma1^2 is zero.
    """
    m = r.m_samples
    if m < 2:
        raise DomainError(f"need M >= 2 samples, got {m}")
    if n_antennas < 1:
        raise DomainError(f"need N >= 1 antennas, got {n_antennas}")

    mu_x = float(np.mean(r.r.real))
    mu_y = float(np.mean(r.r.imag))
    scale = 2.0 * m * n_antennas
    sigma0_sq = float(np.sum(np.abs(r.r) ** 2)) / scale
    residual = (r.r.real - mu_x) ** 2 + (r.r.imag - mu_y) ** 2
    sigma1_sq = float(np.sum(residual)) / scale

    if sigma1_sq == 0:
        raise DegenerateSample("beamformed samples have zero residual variance")
    return MleSet(mu_x_hat=mu_x, mu_y_hat=mu_y, sigma0_sq_hat=sigma0_sq, sigma1_sq_hat=sigma1_sq)
