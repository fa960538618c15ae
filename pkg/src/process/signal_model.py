"""
Phased-array echo model.

Each antenna n delivers M in-phase and quadrature samples
X_nm ~ N(mu_x[n], sigma^2) and Y_nm ~ N(mu_y[n], sigma^2), all independent.
The beamformer sums the antennas with unity gain and zero phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Tuple

import numpy as np

from src.config.settings import DEFAULT_SEED
from src.models.base import beamform_batch
from src.models.samples import BeamformedVector, SnapshotMatrix
from src.utils.custom_exception import DomainError


@dataclass(frozen=True)
class Scenario:
    n_antennas: int
    m_samples: int
    mu_x: Tuple[float, ...]
    mu_y: Tuple[float, ...]
    sigma_sq: float = 1.0
    seed: int = DEFAULT_SEED
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.n_antennas < 1:
            raise DomainError(f"need N >= 1 antennas, got {self.n_antennas}")
        if self.m_samples < 2:
            raise DomainError(f"need M >= 2 samples, got {self.m_samples}")
        if not self.sigma_sq > 0:
            raise DomainError(f"noise variance must be > 0, got {self.sigma_sq}")
        mu_x = tuple(float(v) for v in np.ravel(self.mu_x))
        mu_y = tuple(float(v) for v in np.ravel(self.mu_y))
        if len(mu_x) != self.n_antennas or len(mu_y) != self.n_antennas:
            raise DomainError(
                f"echo means need {self.n_antennas} entries, got {len(mu_x)} and {len(mu_y)}"
            )
        object.__setattr__(self, "mu_x", mu_x)
        object.__setattr__(self, "mu_y", mu_y)

    @classmethod
    def equal_snr(
        cls,
        n_antennas: int,
        m_samples: int,
        snr_n: float,
        sigma_sq: float = 1.0,
        seed: int = DEFAULT_SEED,
        phase: float = 0.0,
    ) -> "Scenario":
        """All antennas share SNR_n (linear); the echo phase is common to every antenna."""
        if snr_n < 0:
            raise DomainError(f"SNR must be >= 0, got {snr_n}")
        amplitude = math.sqrt(2.0 * sigma_sq * snr_n)
        mu_x = (amplitude * math.cos(phase),) * n_antennas
        mu_y = (amplitude * math.sin(phase),) * n_antennas
        return cls(n_antennas, m_samples, mu_x, mu_y, sigma_sq, seed)

    def h0(self) -> "Scenario":
        """Same array with the echo removed."""
        zeros = (0.0,) * self.n_antennas
        return replace(self, mu_x=zeros, mu_y=zeros)

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    @property
    def snr_per_antenna(self) -> np.ndarray:
        """SNR_n = (mu_x[n]^2 + mu_y[n]^2) / (2 sigma^2)."""
        return (np.square(self.mu_x) + np.square(self.mu_y)) / (2.0 * self.sigma_sq)

    @property
    def beamformed_mean(self) -> Tuple[float, float]:
        return float(np.sum(self.mu_x)), float(np.sum(self.mu_y))

    @property
    def upsilon(self) -> float:
        """Aggregate SNR (mu_x^2 + mu_y^2) / (2 N sigma^2) of the beamformed samples."""
        mx, my = self.beamformed_mean
        return (mx ** 2 + my ** 2) / (2.0 * self.n_antennas * self.sigma_sq)

    @property
    def is_h0(self) -> bool:
        return not (any(self.mu_x) or any(self.mu_y))


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate_batch(sc: Scenario, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """`size` independent snapshots as (size, N, M) in-phase and quadrature arrays."""
    shape = (size, sc.n_antennas, sc.m_samples)
    std = math.sqrt(sc.sigma_sq)
    mu_x = np.asarray(sc.mu_x)[:, None]
    mu_y = np.asarray(sc.mu_y)[:, None]
    x = rng.standard_normal(shape) * std + mu_x
    y = rng.standard_normal(shape) * std + mu_y
    return x, y


def generate_snapshot(sc: Scenario, rng: np.random.Generator | None = None) -> SnapshotMatrix:
    """One snapshot; without an explicit stream the scenario seed is used."""
    rng = make_rng(sc.seed) if rng is None else rng
    x, y = generate_batch(sc, rng, 1)
    return SnapshotMatrix(x[0], y[0])


def beamform(s: SnapshotMatrix) -> BeamformedVector:
    """R_m = sum_n (X_nm + j Y_nm)."""
    return BeamformedVector(beamform_batch(s.x, s.y))
