"""
Monte-Carlo estimation of detection rates.

Trials are split into a fixed number of shards, each driven by its own PCG64
stream spawned from the run seed, so results do not depend on the worker
count. Each shard draws snapshots in vectorised batches and reduces them to a
count (or to the statistics themselves for threshold calibration).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Iterator, List, Tuple

import numpy as np
from scipy import stats

from src.config.settings import (
    CONFIDENCE_LEVEL,
    MAX_WORKERS,
    MC_BATCH_ELEMENTS,
    MC_BATCH_SIZE,
    MC_SHARDS,
    MIN_EXCEEDANCES,
)
from src.models.base import BaseDetector, beamform_batch
from src.models.post_glrt import PostGlrtDetector
from src.numerics.distributions import H0Law, H1Law, pdf_h0, pdf_h1
from src.process.signal_model import Scenario, generate_batch, make_rng
from src.utils.custom_exception import DomainError, InsufficientTrials
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class TrialReport:
    trials: int
    detections: int
    rate: float
    ci_low: float
    ci_high: float
    seed: int
    degenerate: int = 0

    @property
    def sigma(self) -> float:
        """Binomial standard error of the rate."""
        return math.sqrt(max(self.rate * (1 - self.rate), 0.0) / self.trials)


def wilson_interval(detections: int, trials: int, confidence: float = CONFIDENCE_LEVEL) -> Tuple[float, float]:
    ci = stats.binomtest(detections, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit seed for a grid point identified by integer keys."""
    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _shard_sizes(trials: int, shards: int) -> List[int]:
    shards = max(1, min(shards, trials))
    base, extra = divmod(trials, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def _batches(sc: Scenario, rng: np.random.Generator, trials: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    batch = max(1, min(MC_BATCH_SIZE, MC_BATCH_ELEMENTS // (sc.n_antennas * sc.m_samples)))
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        yield generate_batch(sc, rng, size)
        done += size


def _run_shards(
    sc: Scenario,
    trials: int,
    shard_fn: Callable[[np.random.Generator, int], object],
    shards: int,
    workers: int,
) -> List[object]:
    """Run `shard_fn(rng, n)` on every shard and return results in shard order."""
    sizes = _shard_sizes(trials, shards)
    seeds = np.random.SeedSequence(sc.seed).spawn(len(sizes))
    results: List[object] = [None] * len(sizes)

    if workers <= 1 or len(sizes) == 1:
        for i, (seed, size) in enumerate(zip(seeds, sizes)):
            results[i] = shard_fn(make_rng(seed), size)
        return results

    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_shard = {
            executor.submit(shard_fn, make_rng(seed), size): i for i, (seed, size) in enumerate(zip(seeds, sizes))
        }
        for future in as_completed(future_to_shard):
            results[future_to_shard[future]] = future.result()
    return results


def estimate_rate(
    detector: BaseDetector,
    threshold: float,
    sc: Scenario,
    trials: int,
    shards: int = MC_SHARDS,
    workers: int = MAX_WORKERS,
) -> TrialReport:
    """
    Fraction of `trials` snapshots for which the detector decides H1.

    Degenerate samples (NaN statistic) count as non-detections and are
    reported in `TrialReport.degenerate`.
    """
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")

    def shard(rng: np.random.Generator, n: int) -> Tuple[int, int]:
        detections = degenerate = 0
        for x, y in _batches(sc, rng, n):
            values = detector.batch_statistic(x, y)
            degenerate += int(np.count_nonzero(np.isnan(values)))
            # ties go to H0
            detections += int(np.count_nonzero(values > threshold))
        return detections, degenerate

    counts = _run_shards(sc, trials, shard, shards, workers)
    detections = sum(c[0] for c in counts)
    degenerate = sum(c[1] for c in counts)
    if degenerate:
        logger.warning(f"{degenerate} degenerate samples in {trials} trials for {detector.name}")

    ci_low, ci_high = wilson_interval(detections, trials)
    rate = detections / trials
    logger.debug(f"{detector.name}: {detections}/{trials} above {threshold:.6g} (seed {sc.seed})")
    return TrialReport(trials, detections, rate, ci_low, ci_high, sc.seed, degenerate)


def simulate_statistics(
    detector: BaseDetector,
    sc: Scenario,
    trials: int,
    shards: int = MC_SHARDS,
    workers: int = MAX_WORKERS,
) -> np.ndarray:
    """All `trials` statistics, concatenated in shard order."""
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")

    def shard(rng: np.random.Generator, n: int) -> np.ndarray:
        return np.concatenate([detector.batch_statistic(x, y) for x, y in _batches(sc, rng, n)])

    return np.concatenate(_run_shards(sc, trials, shard, shards, workers))


def calibrate_threshold(
    detector: BaseDetector,
    pfa: float,
    sc_h0: Scenario,
    trials: int,
    shards: int = MC_SHARDS,
    workers: int = MAX_WORKERS,
) -> float:
    """
    Empirical (1 - pfa) quantile of the statistic under H0.

    Raises
    ------
    InsufficientTrials
        If trials * pfa < MIN_EXCEEDANCES.
    """
    if not 0 < pfa < 1:
        raise DomainError(f"PFA must lie in (0, 1), got {pfa}")
    if trials * pfa < MIN_EXCEEDANCES:
        raise InsufficientTrials(
            f"{trials} trials give {trials * pfa:.1f} expected exceedances at PFA {pfa}, need {MIN_EXCEEDANCES}"
        )
    values = simulate_statistics(detector, sc_h0, trials, shards, workers)
    threshold = float(np.nanquantile(values, 1.0 - pfa))
    logger.info(f"calibrated {detector.name} threshold {threshold:.6g} at PFA {pfa} from {trials} trials")
    return threshold


# ---------------------------------------------------------------------------
# statistical checks of the post-beamforming statistic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    """
    Goodness-of-fit results for the two quadratic forms behind Z.

    I1 = M |mean(R)|^2 / (N sigma^2) and I2 = sum |R - mean(R)|^2 / (N sigma^2),
    so that Z = (M - 1) I1 / I2.
    """

    trials: int
    upsilon: float
    i1_ks_stat: float
    i1_ks_pvalue: float
    i2_ks_stat: float
    i2_ks_pvalue: float
    i2_two_sample_pvalue: float
    pearson: float
    spearman: float

    @property
    def correlation_limit(self) -> float:
        return 4.0 / math.sqrt(self.trials)

    def passes(self, alpha: float = 0.01) -> bool:
        return (
            self.i1_ks_pvalue > alpha
            and self.i2_ks_pvalue > alpha
            and self.i2_two_sample_pvalue > alpha
            and abs(self.pearson) <= self.correlation_limit
            and abs(self.spearman) <= self.correlation_limit
        )


def _quadratic_forms(sc: Scenario, rng: np.random.Generator, trials: int) -> Tuple[np.ndarray, np.ndarray]:
    i1_parts, i2_parts = [], []
    scale = sc.n_antennas * sc.sigma_sq
    m = sc.m_samples
    for x, y in _batches(sc, rng, trials):
        r = beamform_batch(x, y)
        mean = r.mean(axis=-1)
        i1_parts.append(m * np.abs(mean) ** 2 / scale)
        i2_parts.append(np.sum(np.abs(r - mean[:, None]) ** 2, axis=-1) / scale)
    return np.concatenate(i1_parts), np.concatenate(i2_parts)


def lemma_tests(sc: Scenario, trials: int) -> LemmaReport:
    """
    KS tests of I1 against chi2(2) / ncx2(2, lambda1) and of I2 against
    chi2(2(M-1)), a two-sample KS of I2 against its H0 counterpart, and
    Pearson / Spearman correlations of (I1, I2).
    """
    if trials < 10_000:
        raise InsufficientTrials(f"lemma tests need at least 10000 trials, got {trials}")

    streams = np.random.SeedSequence(sc.seed).spawn(2)
    i1, i2 = _quadratic_forms(sc, make_rng(streams[0]), trials)
    _, i2_h0 = _quadratic_forms(sc.h0(), make_rng(streams[1]), trials)

    m = sc.m_samples
    mx, my = sc.beamformed_mean
    lambda1 = m * (mx ** 2 + my ** 2) / (sc.n_antennas * sc.sigma_sq)
    if lambda1 == 0:
        i1_test = stats.kstest(i1, stats.chi2(2).cdf)
    else:
        i1_test = stats.kstest(i1, stats.ncx2(2, lambda1).cdf)
    i2_test = stats.kstest(i2, stats.chi2(2 * (m - 1)).cdf)
    two_sample = stats.ks_2samp(i2, i2_h0)
    pearson = float(np.corrcoef(i1, i2)[0, 1])
    spearman = float(stats.spearmanr(i1, i2)[0])

    report = LemmaReport(
        trials=trials,
        upsilon=sc.upsilon,
        i1_ks_stat=float(i1_test.statistic),
        i1_ks_pvalue=float(i1_test.pvalue),
        i2_ks_stat=float(i2_test.statistic),
        i2_ks_pvalue=float(i2_test.pvalue),
        i2_two_sample_pvalue=float(two_sample.pvalue),
        pearson=pearson,
        spearman=spearman,
    )
    logger.info(
        f"lemma tests M={m} Y={sc.upsilon:.4g}: p(I1)={report.i1_ks_pvalue:.3g} "
        f"p(I2)={report.i2_ks_pvalue:.3g} p(I2 vs H0)={report.i2_two_sample_pvalue:.3g} "
        f"corr={pearson:.2e}"
    )
    return report


@dataclass(frozen=True)
class PdfHistogram:
    edges: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray

    @property
    def centres(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def simulate_pdf(
    sc: Scenario,
    trials: int,
    bins: int = 100,
    z_max: float | None = None,
    workers: int = MAX_WORKERS,
) -> PdfHistogram:
    """
    Density histogram of the post-beamforming statistic next to its analytic density.

    Counts are normalised by the total number of trials, so mass above `z_max`
    is excluded rather than redistributed.
    """
    if bins < 1:
        raise DomainError(f"need at least one bin, got {bins}")
    detector = PostGlrtDetector(sc.n_antennas, sc.m_samples)
    values = simulate_statistics(detector, sc, trials, workers=workers)
    values = values[~np.isnan(values)]
    if z_max is None:
        z_max = float(np.quantile(values, 0.999))

    counts, edges = np.histogram(values, bins=bins, range=(0.0, z_max))
    empirical = counts / (trials * np.diff(edges))
    centres = 0.5 * (edges[:-1] + edges[1:])
    if sc.is_h0:
        analytic = np.asarray(pdf_h0(centres, H0Law(sc.m_samples)))
    else:
        analytic = np.asarray(pdf_h1(centres, H1Law(sc.m_samples, sc.upsilon)))
    return PdfHistogram(edges=edges, empirical=empirical, analytic=analytic)
