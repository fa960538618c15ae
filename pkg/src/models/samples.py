"""Sample containers shared by the detectors and the simulator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.utils.custom_exception import DomainError


@dataclass(frozen=True)
class SnapshotMatrix:
    """In-phase (x) and quadrature (y) samples, both N antennas x M samples."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.atleast_2d(np.asarray(self.y, dtype=float))
        if x.shape != y.shape or x.ndim != 2:
            raise DomainError(f"in-phase {x.shape} and quadrature {y.shape} shapes differ")
        if x.shape[1] < 2:
            raise DomainError(f"need M >= 2 samples, got {x.shape[1]}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_antennas(self) -> int:
        return self.x.shape[0]

    @property
    def m_samples(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class BeamformedVector:
    """Post-beamforming complex samples R_1..R_M."""

    r: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=complex).ravel()
        if r.size < 1:
            raise DomainError("beamformed vector is empty")
        object.__setattr__(self, "r", r)

    @property
    def m_samples(self) -> int:
        return self.r.size
