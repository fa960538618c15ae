from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from src.models.samples import BeamformedVector, SnapshotMatrix


class Hypothesis(str, Enum):
    H0 = "H0"
    H1 = "H1"


def decide(statistic: float, threshold: float) -> Hypothesis:
    """H1 iff statistic > threshold; ties go to H0."""
    return Hypothesis.H1 if statistic > threshold else Hypothesis.H0


def beamform_batch(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sum over antennas of (..., N, M) in-phase/quadrature arrays -> (..., M) complex."""
    return x.sum(axis=-2) + 1j * y.sum(axis=-2)


class BaseDetector(ABC):
    """
    A detector maps a snapshot to a scalar statistic and compares it with a threshold.

    `statistic` works on a single sample and raises on degenerate input;
    `batch_statistic` works on stacked (B, N, M) snapshots and marks degenerate
    trials with NaN.
    """

    name: str = "detector"
    uses_snapshot: bool = False

    def __init__(self, n_antennas: int, m_samples: int, **kwargs):
        self.params = dict(n_antennas=n_antennas, m_samples=m_samples)
        self.params.update(kwargs)

    def set_params(self, **kwargs):
        self.params.update(kwargs)

    @property
    def n_antennas(self) -> int:
        return self.params["n_antennas"]

    @property
    def m_samples(self) -> int:
        return self.params["m_samples"]

    @abstractmethod
    def statistic(self, sample: BeamformedVector | SnapshotMatrix) -> float:
        ...

    @abstractmethod
    def batch_statistic(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def threshold(self, pfa: float) -> float:
        """Analytic threshold for a target PFA."""
        ...

    def decide(self, statistic: float, threshold: float) -> Hypothesis:
        return decide(statistic, threshold)

    def prepare(self, sample: BeamformedVector | SnapshotMatrix) -> BeamformedVector | SnapshotMatrix:
        """Beamform a snapshot unless the detector works on per-antenna data."""
        if isinstance(sample, SnapshotMatrix) and not self.uses_snapshot:
            return BeamformedVector(beamform_batch(sample.x, sample.y))
        return sample

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"
