from __future__ import annotations

from typing import Dict, Type

from src.models.base import BaseDetector
from src.models.lrt import LrtDetector
from src.models.post_glrt import PostGlrtDetector
from src.models.pre_glrt import PreGlrtDetector
from src.models.square_law import SquareLawDetector
from src.process.signal_model import Scenario
from src.utils.custom_exception import ConfigError

DETECTOR_CLASSES: Dict[str, Type[BaseDetector]] = {
    PostGlrtDetector.name: PostGlrtDetector,
    PreGlrtDetector.name: PreGlrtDetector,
    SquareLawDetector.name: SquareLawDetector,
    LrtDetector.name: LrtDetector,
}


def build_detector(name: str, scenario: Scenario) -> BaseDetector:
    """
    Instantiate a detector for a scenario.

    Detectors that need known parameters (square-law noise power, LRT echo
    means) take them from the scenario; the LRT always uses the H1 means even
    when run on H0 data.
    """
    try:
        detector_cls = DETECTOR_CLASSES[name]
    except KeyError:
        raise ConfigError(f"unknown detector '{name}', expected one of {sorted(DETECTOR_CLASSES)}", field="detector")

    detector = detector_cls(scenario.n_antennas, scenario.m_samples)
    if detector_cls is SquareLawDetector:
        detector.set_params(sigma_sq=scenario.sigma_sq)
    elif detector_cls is LrtDetector:
        mu_x, mu_y = scenario.beamformed_mean
        detector.set_params(mu_x=mu_x, mu_y=mu_y, sigma_sq=scenario.sigma_sq)
    return detector
