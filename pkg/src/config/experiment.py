"""
Experiment configuration loaded from YAML.

A config file describes one experiment:

    experiment_id: roc_m22_n3
    detectors: [post_glrt, pre_glrt, square_law, lrt]
    methods: [series, closed_form, montecarlo]
    scenario:
      m_samples: 22
      n_antennas: 3
      sigma_sq: 1.0
      snr_db: [-7.9, -6.5, -5.1]
    pfa: [1.0e-6, 1.0e-5, 1.0e-4, 1.0e-3, 1.0e-2]
    family: {name: none}
    trials: 100000
    seed: 20240917
    output: results/roc_m22_n3.csv

Per-antenna SNR values are given in dB and converted to linear units once, in
`ScenarioConfig`. Explicit per-antenna echo means (`mu_x`, `mu_y`) may replace
the SNR grid for a single unequal-SNR scenario.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from src.config.constants import DETECTORS, METHODS
from src.config.settings import (
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    MAX_WORKERS,
    MC_TRIALS,
    OUTPUT_DIR,
    PROJECT_ROOT,
    TARGET_PD,
)
from src.process.signal_model import Scenario
from src.utils.custom_exception import ConfigError, DomainError
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)

FAMILIES = ("none", "n_antennas", "m_samples", "pfa")


def _as_tuple(value: Any, name: str, cast=float) -> Tuple:
    if value is None:
        return ()
    items = value if isinstance(value, (list, tuple)) else [value]
    try:
        return tuple(cast(v) for v in items)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"expected a list of {cast.__name__} values, got {value!r}", field=name, original_exception=e)


def _as_float(value: Any, name: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}", field=name)
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"expected a number, got {value!r}", field=name, original_exception=e)


def _as_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", field=name)
    return int(value)


@dataclass
class ScenarioConfig:
    m_samples: int
    n_antennas: int
    sigma_sq: float = 1.0
    snr_db: Tuple[float, ...] = ()
    mu_x: Tuple[float, ...] = ()
    mu_y: Tuple[float, ...] = ()
    phase: float = 0.0
    snr_linear: Tuple[float, ...] = field(init=False, default=())

    def __post_init__(self) -> None:
        self.m_samples = _as_int(self.m_samples, "scenario.m_samples")
        self.n_antennas = _as_int(self.n_antennas, "scenario.n_antennas")
        self.sigma_sq = _as_float(self.sigma_sq, "scenario.sigma_sq")
        self.phase = _as_float(self.phase, "scenario.phase")
        if self.m_samples < 2:
            raise ConfigError(f"need at least 2 samples, got {self.m_samples}", field="scenario.m_samples")
        if self.n_antennas < 1:
            raise ConfigError(f"need at least 1 antenna, got {self.n_antennas}", field="scenario.n_antennas")
        if not self.sigma_sq > 0:
            raise ConfigError(f"noise variance must be > 0, got {self.sigma_sq}", field="scenario.sigma_sq")

        self.snr_db = _as_tuple(self.snr_db, "scenario.snr_db")
        self.mu_x = _as_tuple(self.mu_x, "scenario.mu_x")
        self.mu_y = _as_tuple(self.mu_y, "scenario.mu_y")

        if self.mu_x or self.mu_y:
            if self.snr_db:
                raise ConfigError("give either an SNR grid or explicit echo means, not both", field="scenario")
            if len(self.mu_x) != self.n_antennas or len(self.mu_y) != self.n_antennas:
                raise ConfigError(
                    f"echo means need {self.n_antennas} entries each, got {len(self.mu_x)} and {len(self.mu_y)}",
                    field="scenario.mu_x",
                )
        elif not self.snr_db:
            raise ConfigError("SNR grid is empty", field="scenario.snr_db")

        if any(not math.isfinite(v) for v in self.snr_db):
            raise ConfigError(f"SNR values must be finite dB numbers, got {self.snr_db}", field="scenario.snr_db")
        # the only dB -> linear conversion of the configured SNR values
        self.snr_linear = tuple(10.0 ** (v / 10.0) for v in self.snr_db)

    @property
    def explicit_means(self) -> bool:
        return bool(self.mu_x)

    def scenarios(self, seed: int, m_samples: Optional[int] = None, n_antennas: Optional[int] = None):
        """
        (snr_n linear, Scenario) pairs over the SNR grid, with optional family overrides.

        For explicit echo means a single pair is returned whose SNR is the
        mean per-antenna SNR.
        """
        m = self.m_samples if m_samples is None else m_samples
        n = self.n_antennas if n_antennas is None else n_antennas
        try:
            if self.explicit_means:
                if n != self.n_antennas:
                    raise ConfigError("explicit echo means cannot be swept over N", field="family.name")
                sc = Scenario(n, m, self.mu_x, self.mu_y, self.sigma_sq, seed)
                return [(float(sc.snr_per_antenna.mean()), sc)]
            return [
                (snr, Scenario.equal_snr(n, m, snr, self.sigma_sq, seed, self.phase))
                for snr in self.snr_linear
            ]
        except DomainError as e:
            raise ConfigError(f"invalid scenario: {e.message}", field="scenario", original_exception=e)

    def echo(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "m_samples": self.m_samples,
            "n_antennas": self.n_antennas,
            "sigma_sq": self.sigma_sq,
            "phase": self.phase,
        }
        if self.explicit_means:
            data["mu_x"] = list(self.mu_x)
            data["mu_y"] = list(self.mu_y)
        else:
            data["snr_db"] = [10.0 * math.log10(v) for v in self.snr_linear]
        return data


@dataclass
class FamilyConfig:
    """Parameter swept across curves: N, M, PFA, or nothing."""

    name: str = "none"
    values: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.name not in FAMILIES:
            raise ConfigError(f"unknown family '{self.name}', expected one of {FAMILIES}", field="family.name")
        if self.name == "none":
            self.values = ()
            return
        cast = float if self.name == "pfa" else int
        self.values = _as_tuple(self.values, "family.values", cast)
        if not self.values:
            raise ConfigError(f"family '{self.name}' needs values", field="family.values")
        if self.name == "pfa" and any(not 0 < v < 1 for v in self.values):
            raise ConfigError(f"PFA values must lie in (0, 1), got {self.values}", field="family.values")
        if self.name == "m_samples" and any(v < 2 for v in self.values):
            raise ConfigError(f"M values must be >= 2, got {self.values}", field="family.values")
        if self.name == "n_antennas" and any(v < 1 for v in self.values):
            raise ConfigError(f"N values must be >= 1, got {self.values}", field="family.values")


@dataclass
class PdfConfig:
    bins: int = 100
    z_max: Optional[float] = None

    def __post_init__(self) -> None:
        self.bins = _as_int(self.bins, "pdf.bins")
        if self.bins < 1:
            raise ConfigError(f"need at least one bin, got {self.bins}", field="pdf.bins")
        if self.z_max is not None:
            self.z_max = _as_float(self.z_max, "pdf.z_max")
        if self.z_max is not None and not self.z_max > 0:
            raise ConfigError(f"z_max must be > 0, got {self.z_max}", field="pdf.z_max")


@dataclass
class ExperimentConfig:
    experiment_id: str
    scenario: ScenarioConfig
    detectors: Tuple[str, ...] = DETECTORS
    methods: Tuple[str, ...] = ("series", "closed_form", "montecarlo")
    pfa: Tuple[float, ...] = (1e-4,)
    family: FamilyConfig = field(default_factory=FamilyConfig)
    target_pd: float = TARGET_PD
    trials: int = MC_TRIALS
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE
    workers: int = MAX_WORKERS
    calibrate_pre_glrt: bool = False
    output: Optional[Path] = None
    pdf: PdfConfig = field(default_factory=PdfConfig)

    def __post_init__(self) -> None:
        if not self.experiment_id:
            raise ConfigError("experiment id is empty", field="experiment_id")
        self.detectors = _as_tuple(self.detectors, "detectors", str)
        if not self.detectors:
            raise ConfigError("detector list is empty", field="detectors")
        unknown = [d for d in self.detectors if d not in DETECTORS]
        if unknown:
            raise ConfigError(f"unknown detectors {unknown}, expected {DETECTORS}", field="detectors")

        self.methods = _as_tuple(self.methods, "methods", str)
        if not self.methods:
            raise ConfigError("method list is empty", field="methods")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}, expected {METHODS}", field="methods")

        self.pfa = _as_tuple(self.pfa, "pfa")
        if not self.pfa:
            raise ConfigError("PFA grid is empty", field="pfa")
        if any(not 0 < p < 1 for p in self.pfa):
            raise ConfigError(f"PFA values must lie in (0, 1), got {self.pfa}", field="pfa")

        self.target_pd = _as_float(self.target_pd, "target_pd")
        self.tolerance = _as_float(self.tolerance, "tolerance")
        if not 0 < self.target_pd < 1:
            raise ConfigError(f"target PD must lie in (0, 1), got {self.target_pd}", field="target_pd")
        self.trials = _as_int(self.trials, "trials")
        if self.trials < 0:
            raise ConfigError(f"trials must be >= 0, got {self.trials}", field="trials")
        self.seed = _as_int(self.seed, "seed")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}", field="seed")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tolerance}", field="tolerance")
        self.workers = _as_int(self.workers, "workers")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}", field="workers")
        if self.output is not None:
            self.output = Path(self.output)

    @property
    def output_path(self) -> Path:
        if self.output is None:
            return OUTPUT_DIR / f"{self.experiment_id}.csv"
        return self.output if self.output.is_absolute() else PROJECT_ROOT / self.output

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, Mapping):
            raise ConfigError(f"config must be a mapping, got {type(data).__name__}")
        data = dict(data)

        known = {f for f in cls.__dataclass_fields__}
        extra = sorted(set(data) - known)
        if extra:
            raise ConfigError(f"unknown keys {extra}", field=extra[0])

        scenario = data.pop("scenario", None)
        if not isinstance(scenario, Mapping):
            raise ConfigError("missing scenario section", field="scenario")
        family = data.pop("family", None) or {}
        pdf = data.pop("pdf", None) or {}

        try:
            return cls(
                scenario=ScenarioConfig(**scenario),
                family=FamilyConfig(**family),
                pdf=PdfConfig(**pdf),
                **data,
            )
        except TypeError as e:
            # unexpected or missing keys inside a section
            raise ConfigError(f"malformed config: {e}", original_exception=e)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle)
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}", field="config", original_exception=e)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark is not None else ""
            raise ConfigError(f"cannot parse {path}{where}", field="config", original_exception=e)

        logger.info(f"Loaded experiment config {path}")
        return cls.from_mapping(data or {})

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Copy with CLI overrides applied; None values are ignored."""
        values = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **values) if values else self

    def echo(self) -> Dict[str, Any]:
        """Normalised mapping; SNR values in dB are re-derived from the stored linear values."""
        return {
            "experiment_id": self.experiment_id,
            "detectors": list(self.detectors),
            "methods": list(self.methods),
            "scenario": self.scenario.echo(),
            "pfa": list(self.pfa),
            "family": {"name": self.family.name, "values": list(self.family.values)},
            "target_pd": self.target_pd,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "workers": self.workers,
            "calibrate_pre_glrt": self.calibrate_pre_glrt,
            "output": str(self.output) if self.output is not None else None,
            "pdf": {"bins": self.pdf.bins, "z_max": self.pdf.z_max},
        }


@dataclass
class FoxHConfig:
    """
    A Fox H evaluation request.

    `kind: pd` builds the detection-probability problem from (m_samples, pfa,
    upsilon_db); `kind: general` takes the coefficients verbatim.
    """

    kind: str = "pd"
    m_samples: int = 50
    pfa: float = 1e-6
    upsilon_db: float = -5.0
    x: Tuple[float, ...] = ()
    delta: Tuple[float, ...] = ()
    dmat: Tuple[Tuple[float, ...], ...] = ()
    beta: Tuple[float, ...] = ()
    bmat: Tuple[Tuple[float, ...], ...] = ()
    contour_offsets: Optional[Tuple[float, ...]] = None
    contour_kinds: Optional[Tuple[str, ...]] = None
    truncation: Optional[float] = None
    log_scale: float = 0.0
    strategy: str = "saddle"
    tolerance: float = 1e-10

    def __post_init__(self) -> None:
        if self.kind not in ("pd", "general"):
            raise ConfigError(f"unknown Fox H problem kind '{self.kind}'", field="kind")
        if self.strategy not in ("midpoint", "saddle"):
            raise ConfigError(f"unknown contour strategy '{self.strategy}'", field="strategy")
        self.tolerance = _as_float(self.tolerance, "tolerance")
        self.log_scale = _as_float(self.log_scale, "log_scale")
        if self.truncation is not None:
            self.truncation = _as_float(self.truncation, "truncation")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0, got {self.tolerance}", field="tolerance")
        if self.kind == "pd":
            self.pfa = _as_float(self.pfa, "pfa")
            self.upsilon_db = _as_float(self.upsilon_db, "upsilon_db")
            self.m_samples = _as_int(self.m_samples, "m_samples")
            if self.m_samples < 2:
                raise ConfigError(f"need M >= 2, got {self.m_samples}", field="m_samples")
            if not 0 < self.pfa < 1:
                raise ConfigError(f"PFA must lie in (0, 1), got {self.pfa}", field="pfa")
        else:
            self.x = _as_tuple(self.x, "x")
            self.delta = _as_tuple(self.delta, "delta")
            if not self.x or not self.delta:
                raise ConfigError("a general problem needs x and delta", field="x")

    @classmethod
    def from_yaml(cls, path: str | Path) -> "FoxHConfig":
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read Fox H problem {path}", field="config", original_exception=e)
        if not isinstance(data, Mapping):
            raise ConfigError("Fox H problem must be a mapping", field="config")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(f"malformed Fox H problem: {e}", field="config", original_exception=e)
