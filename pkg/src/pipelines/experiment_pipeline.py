"""
ROC, PD-versus-SNR and PDF experiments.

Every experiment loops over a grid (family value, SNR, detector, PFA, method),
collects one row per point and writes a CSV with a fixed column order after a
deterministic sort.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.config.experiment import ExperimentConfig
from src.models.registry import build_detector
from src.numerics.analytic import analytic_pd, linear_to_db, snr_loss
from src.pipelines.montecarlo import calibrate_threshold, derive_seed, estimate_rate, simulate_pdf
from src.process.signal_model import Scenario
from src.utils.custom_exception import BracketError, CustomException, DomainError
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)

CSV_COLUMNS = [
    "experiment_id",
    "detector",
    "method",
    "family",
    "family_value",
    "m_samples",
    "n_antennas",
    "pfa",
    "snr_db",
    "upsilon_db",
    "pd",
    "ci_low",
    "ci_high",
    "terms_used",
    "elapsed_ms",
    "snr_loss_db",
]

PDF_COLUMNS = ["experiment_id", "hypothesis", "m_samples", "n_antennas", "upsilon_db", "z", "empirical", "analytic"]

SORT_KEYS = ["experiment_id", "family_value", "detector", "method", "pfa", "snr_db"]

ANALYTIC_METHODS = {
    "post_glrt": ("series", "quadrature", "foxh"),
    "pre_glrt": ("closed_form",),
    "square_law": ("closed_form",),
    "lrt": ("closed_form",),
}


def write_csv(df: pd.DataFrame, path: Path, columns: List[str]) -> Path:
    """Write rows with a fixed column order, LF endings and 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = df.reindex(columns=columns)
    for column in ("terms_used",):
        if column in df:
            df[column] = df[column].astype("Int64")
    df.to_csv(path, index=False, lineterminator="\n", float_format="%.17g", encoding="utf-8")
    logger.info(f"Wrote {len(df)} rows to {path}")
    return path


def _sorted_frame(rows: List[dict]) -> pd.DataFrame:
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    if df.empty:
        return df
    return df.sort_values(SORT_KEYS, kind="mergesort", na_position="first").reset_index(drop=True)


def _family_points(config: ExperimentConfig) -> List[Tuple[Optional[float], int, int, Tuple[float, ...]]]:
    """(family value, M, N, PFA grid) per curve family member."""
    sc = config.scenario
    family = config.family
    if family.name == "none":
        return [(None, sc.m_samples, sc.n_antennas, config.pfa)]
    if family.name == "n_antennas":
        return [(v, sc.m_samples, int(v), config.pfa) for v in family.values]
    if family.name == "m_samples":
        return [(v, int(v), sc.n_antennas, config.pfa) for v in family.values]
    return [(v, sc.m_samples, sc.n_antennas, (v,)) for v in family.values]


def _analytic_snr(detector: str, scenario: Scenario, snr_n: float) -> float:
    """Per-antenna SNR fed to the analytic laws.

    Only the pre-beamforming law depends on the spread of per-antenna SNRs
    (through their sum); the others depend on the beamformed SNR alone.
    """
    if detector == "pre_glrt":
        return float(scenario.snr_per_antenna.mean())
    return scenario.upsilon / scenario.n_antennas


def _base_row(config: ExperimentConfig, detector: str, method: str, family_value, scenario: Scenario, pfa: float, snr_n: float) -> dict:
    return {
        "experiment_id": config.experiment_id,
        "detector": detector,
        "method": method,
        "family": config.family.name,
        "family_value": family_value,
        "m_samples": scenario.m_samples,
        "n_antennas": scenario.n_antennas,
        "pfa": pfa,
        "snr_db": linear_to_db(snr_n) if snr_n > 0 else -math.inf,
        "upsilon_db": linear_to_db(scenario.upsilon) if scenario.upsilon > 0 else -math.inf,
    }


def _montecarlo_threshold(config: ExperimentConfig, detector, scenario: Scenario, pfa: float, keys: Tuple[int, ...]) -> float:
    if detector.name == "pre_glrt" and config.calibrate_pre_glrt:
        h0 = scenario.h0().with_seed(derive_seed(config.seed, *keys, 0))
        return calibrate_threshold(detector, pfa, h0, config.trials, workers=config.workers)
    return detector.threshold(pfa)


def evaluate_grid(config: ExperimentConfig) -> pd.DataFrame:
    """Analytic and Monte-Carlo PD for every grid point of an experiment."""
    rows: List[dict] = []

    for i_family, (family_value, m, n, pfa_grid) in enumerate(_family_points(config)):
        for i_snr, (snr_n, scenario) in enumerate(config.scenario.scenarios(config.seed, m_samples=m, n_antennas=n)):
            logger.info(
                f"[{config.experiment_id}] M={m} N={n} SNR_n={linear_to_db(snr_n):.2f} dB"
                + (f" {config.family.name}={family_value}" if family_value is not None else "")
            )
            for detector_name in config.detectors:
                detector = build_detector(detector_name, scenario)
                for i_pfa, pfa in enumerate(pfa_grid):
                    for method in config.methods:
                        row = _base_row(config, detector_name, method, family_value, scenario, pfa, snr_n)

                        if method == "montecarlo":
                            if config.trials == 0:
                                continue
                            keys = (i_family, i_snr, i_pfa, config.detectors.index(detector_name))
                            threshold = _montecarlo_threshold(config, detector, scenario, pfa, keys)
                            report = estimate_rate(
                                detector,
                                threshold,
                                scenario.with_seed(derive_seed(config.seed, *keys, 1)),
                                config.trials,
                                workers=config.workers,
                            )
                            row.update(pd=report.rate, ci_low=report.ci_low, ci_high=report.ci_high)
                        elif method in ANALYTIC_METHODS[detector_name]:
                            pd_value, terms = analytic_pd(
                                detector_name,
                                method,
                                m,
                                n,
                                pfa,
                                _analytic_snr(detector_name, scenario, snr_n),
                                config.tolerance,
                            )
                            row.update(pd=pd_value, terms_used=terms)
                        else:
                            continue
                        rows.append(row)

    return _sorted_frame(rows)


def _curve(df: pd.DataFrame) -> Dict[float, float]:
    return dict(zip(df["snr_db"].astype(float), df["pd"].astype(float)))


def add_snr_loss(df: pd.DataFrame, target_pd: float, reference: str = "lrt") -> pd.DataFrame:
    """
    Fill `snr_loss_db` per curve against the closed-form reference curve of the
    same family member and PFA. Curves that miss the target PD stay empty.
    """
    df = df.copy()
    ref_rows = df[(df["detector"] == reference) & (df["method"] == "closed_form")]
    if ref_rows.empty:
        logger.warning(f"no closed-form {reference} rows; SNR loss left empty")
        return df

    group_keys = ["family_value", "pfa", "m_samples", "n_antennas"]
    curve_keys = group_keys + ["detector", "method"]
    for key, curve_df in df.groupby(curve_keys, dropna=False, sort=True):
        group = dict(zip(curve_keys, key))
        ref = ref_rows
        for k in group_keys:
            ref = ref[ref[k].isna()] if pd.isna(group[k]) else ref[ref[k] == group[k]]
        if ref.empty or len(curve_df) < 2:
            continue
        try:
            loss = snr_loss(_curve(curve_df), _curve(ref), target_pd)
        except (BracketError, DomainError) as e:
            logger.warning(f"no SNR loss for {group}: {e.message}")
            continue
        df.loc[curve_df.index, "snr_loss_db"] = loss
    return df


def cmd_roc(config: ExperimentConfig) -> Path:
    """PD over the PFA grid at every configured SNR."""
    try:
        df = evaluate_grid(config)
    except CustomException:
        raise
    except Exception as e:
        logger.exception("ROC experiment failed")
        raise CustomException("ROC experiment failed", e) from e
    return write_csv(df, config.output_path, CSV_COLUMNS)


def cmd_pd_vs_snr(config: ExperimentConfig) -> Path:
    """PD against SNR per family member, with the SNR loss against the LRT at `target_pd`."""
    try:
        df = evaluate_grid(config)
        df = add_snr_loss(df, config.target_pd)
    except CustomException:
        raise
    except Exception as e:
        logger.exception("PD-versus-SNR experiment failed")
        raise CustomException("PD-versus-SNR experiment failed", e) from e

    losses = df.dropna(subset=["snr_loss_db"]).drop_duplicates(["family_value", "pfa", "detector", "method"])
    for _, row in losses.iterrows():
        logger.info(
            f"SNR loss {row['detector']}/{row['method']} ({config.family.name}={row['family_value']}, "
            f"PFA={row['pfa']:g}): {row['snr_loss_db']:.2f} dB at PD={config.target_pd}"
        )
    return write_csv(df, config.output_path, CSV_COLUMNS)


def pdf_rows(config: ExperimentConfig) -> pd.DataFrame:
    rows: List[dict] = []
    pairs: Iterable[Tuple[str, Scenario]]

    scenarios = config.scenario.scenarios(config.seed)
    h0 = scenarios[0][1].h0().with_seed(derive_seed(config.seed, 0))
    pairs = [("H0", h0)] + [
        ("H1", sc.with_seed(derive_seed(config.seed, i + 1))) for i, (_, sc) in enumerate(scenarios)
    ]

    for hypothesis, sc in pairs:
        hist = simulate_pdf(sc, config.trials, config.pdf.bins, config.pdf.z_max, workers=config.workers)
        upsilon_db = linear_to_db(sc.upsilon) if sc.upsilon > 0 else np.nan
        for z, empirical, analytic in zip(hist.centres, hist.empirical, hist.analytic):
            rows.append(
                {
                    "experiment_id": config.experiment_id,
                    "hypothesis": hypothesis,
                    "m_samples": sc.m_samples,
                    "n_antennas": sc.n_antennas,
                    "upsilon_db": upsilon_db,
                    "z": z,
                    "empirical": empirical,
                    "analytic": analytic,
                }
            )
    return pd.DataFrame(rows, columns=PDF_COLUMNS)


def cmd_pdf(config: ExperimentConfig) -> Path:
    """Histogram of the post-beamforming statistic against its analytic density under H0 and H1."""
    if config.trials < 1:
        raise DomainError("the PDF comparison needs trials >= 1")
    df = pdf_rows(config)
    return write_csv(df, config.output_path, PDF_COLUMNS)
