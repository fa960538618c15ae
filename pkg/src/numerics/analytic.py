"""
Closed-form false-alarm probability, threshold inversion and detection probability
of the post-beamforming GLRT detector, plus the standard laws of the comparison
detectors and SNR-loss computation.

The PD of the post-beamforming detector is available three ways:

* `pd_quadrature`  single integral over a finite interval,
* `pd_series`      residue series with an a-priori truncation bound,
* `pd_foxh`        bivariate Fox H contour integral (see `src.numerics.foxh`).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy import interpolate, optimize, stats
from scipy import special as sc

from src.config.settings import DEFAULT_TOLERANCE, SERIES_MAX_TERMS
from src.numerics.distributions import H1Law, sf_h1
from src.numerics.foxh import PdFoxHInputs, pd_foxh
from src.numerics.special_functions import laguerre, log_gauss_2f1
from src.utils.custom_exception import BracketError, DomainError, NonConvergence
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def pfa_closed_form(gamma: float, m: int) -> float:
    """PFA = ((M-1)/(gamma+M-1))^(M-1)."""
    if gamma < 0:
        raise DomainError(f"threshold must be >= 0, got {gamma}")
    if m < 2:
        raise DomainError(f"M must be >= 2, got {m}")
    return math.exp(-(m - 1) * math.log1p(gamma / (m - 1)))


def threshold_for_pfa(pfa: float, m: int) -> float:
    """
    Threshold meeting a desired PFA: gamma = 1 - M + (M-1) PFA^(1/(1-M)).

    The threshold depends on M only; neither the noise power nor the number of
    antennas enters.
    """
    if not 0 < pfa <= 1:
        raise DomainError(f"PFA must lie in (0, 1], got {pfa}")
    if m < 2:
        raise DomainError(f"M must be >= 2, got {m}")
    return (m - 1) * math.expm1(-math.log(pfa) / (m - 1))


@dataclass(frozen=True)
class OperatingPoint:
    """(M, PFA, upsilon) with the threshold derived from PFA."""

    m: int
    pfa: float
    upsilon: float
    gamma: float

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"M must be an integer >= 2, got {self.m}")
        if not 0 < self.pfa <= 1:
            raise DomainError(f"PFA must lie in (0, 1], got {self.pfa}")
        if not self.upsilon >= 0:
            raise DomainError(f"upsilon must be >= 0, got {self.upsilon}")
        if self.gamma < 0:
            raise DomainError(f"threshold must be >= 0, got {self.gamma}")
        implied = pfa_closed_form(self.gamma, self.m)
        if abs(implied - self.pfa) > 1e-10 * self.pfa:
            raise DomainError(f"threshold {self.gamma} implies PFA {implied}, not {self.pfa}")

    @classmethod
    def from_pfa(cls, m: int, pfa: float, upsilon: float) -> "OperatingPoint":
        return cls(m=m, pfa=pfa, upsilon=upsilon, gamma=threshold_for_pfa(pfa, m))

    @property
    def omega(self) -> float:
        """Omega = (M-1)/gamma."""
        if self.gamma == 0:
            return math.inf
        return (self.m - 1) / self.gamma


@dataclass(frozen=True)
class SeriesReport:
    pd: float
    terms_used: int
    bound_at_stop: float
    elapsed: float  # seconds


def pd_quadrature(op: OperatingPoint, tol: float = DEFAULT_TOLERANCE) -> float:
    """PD as a single integral of the H1 density over [gamma, inf)."""
    if op.upsilon == 0:
        return pfa_closed_form(op.gamma, op.m)
    return sf_h1(op.gamma, H1Law(op.m, op.upsilon), tol=tol)


def truncation_bound(m: int, upsilon: float, omega: float, t0: int) -> float:
    """
    Upper bound on the residue-series tail from term t0 onwards:

        Omega^(M-1) L_{M-1}(-M Y) 2F1(M-1, M+T0; M; -Omega)
    """
    if t0 < 0:
        raise DomainError(f"t0 must be >= 0, got {t0}")
    if omega <= 0:
        raise DomainError(f"omega must be > 0, got {omega}")
    log_laguerre = math.log(laguerre(m - 1, -m * upsilon))
    log_hyp, _ = log_gauss_2f1(m - 1, m + t0, m, -omega)
    return math.exp((m - 1) * math.log(omega) + log_laguerre + log_hyp)


def _log_series_term(k: int, m: int, log_ym: float, log_omega: float, omega: float, upsilon_m: float) -> float:
    log_hyp, _ = log_gauss_2f1(m - 1, k + m, m, -omega)
    return (
        -upsilon_m
        + (m - 1) * log_omega
        + sc.gammaln(k + m)
        + k * log_ym
        - 2.0 * sc.gammaln(k + 1)
        + log_hyp
        - sc.gammaln(m)
    )


def pd_series(op: OperatingPoint, tol: float = DEFAULT_TOLERANCE) -> SeriesReport:
    """
    PD by the residue series

        exp(-Y M) Omega^(M-1) sum_k Gamma(k+M) (Y M)^k / k!^2 * 2F1~(M-1, k+M; M; -Omega)

    Terms are accumulated in log space. After each term the tail bound is
    evaluated and the summation stops at the first T0 whose bound is <= tol.

    Raises
    ------
    NonConvergence
        If `SERIES_MAX_TERMS` terms do not bring the bound below tol.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be > 0, got {tol}")
    start = time.perf_counter()
    m = op.m

    if op.gamma == 0:
        return SeriesReport(pd=1.0, terms_used=0, bound_at_stop=0.0, elapsed=time.perf_counter() - start)

    omega = op.omega
    log_omega = math.log(omega)
    upsilon_m = op.upsilon * m

    if op.upsilon == 0:
        # only the k = 0 term survives
        value = math.exp(_log_series_term(0, m, 0.0, log_omega, omega, 0.0))
        return SeriesReport(pd=min(value, 1.0), terms_used=1, bound_at_stop=0.0, elapsed=time.perf_counter() - start)

    log_ym = math.log(upsilon_m)
    log_terms: list[float] = []
    bound = math.inf
    for k in range(SERIES_MAX_TERMS):
        log_terms.append(_log_series_term(k, m, log_ym, log_omega, omega, upsilon_m))
        bound = truncation_bound(m, op.upsilon, omega, k + 1)
        if bound <= tol:
            break
    else:
        raise NonConvergence(f"residue series needs more than {SERIES_MAX_TERMS} terms (bound {bound:.3e})")

    pd = float(np.exp(sc.logsumexp(log_terms)))
    elapsed = time.perf_counter() - start
    logger.debug(f"pd_series M={m} pfa={op.pfa:g} Y={op.upsilon:g}: {len(log_terms)} terms, bound {bound:.3e}")
    return SeriesReport(pd=min(max(pd, 0.0), 1.0), terms_used=len(log_terms), bound_at_stop=bound, elapsed=elapsed)


def series_tail(op: OperatingPoint, t0: int, rel_tol: float = 1e-6) -> float:
    """
    Sum of the residue-series terms k >= t0.

    Summation stops once the tail bound of the remaining terms falls below
    `rel_tol` times the accumulated tail, so the value is a lower estimate
    accurate to that relative tolerance.
    """
    if t0 < 0:
        raise DomainError(f"t0 must be >= 0, got {t0}")
    if op.upsilon == 0 or op.gamma == 0:
        raise DomainError("the series tail is only defined for upsilon > 0 and a positive threshold")
    m, omega = op.m, op.omega
    upsilon_m = op.upsilon * m
    log_ym, log_omega = math.log(upsilon_m), math.log(omega)

    log_terms: list[float] = []
    for k in range(t0, t0 + SERIES_MAX_TERMS):
        log_terms.append(_log_series_term(k, m, log_ym, log_omega, omega, upsilon_m))
        tail = float(np.exp(sc.logsumexp(log_terms)))
        remainder = truncation_bound(m, op.upsilon, omega, k + 1)
        if remainder <= rel_tol * tail or remainder < 1e-300:
            return tail
    raise NonConvergence(f"series tail from {t0} needs more than {SERIES_MAX_TERMS} terms")


def pd_foxh_for(op: OperatingPoint, tol: float = 1e-10, truncation: float | None = None) -> float:
    """PD through the bivariate Fox H representation for an operating point."""
    if op.gamma == 0:
        return 1.0
    inputs = PdFoxHInputs.from_operating_point(op.m, op.upsilon, op.omega)
    return pd_foxh(inputs, tol=tol, truncation=truncation)


def pd_noncentral_f(op: OperatingPoint) -> float:
    """PD as the survival of a noncentral F(2, 2(M-1)) law with noncentrality 2 M Y."""
    if op.upsilon == 0:
        return float(stats.f.sf(op.gamma, 2, 2 * (op.m - 1)))
    return float(stats.ncf.sf(op.gamma, 2, 2 * (op.m - 1), 2 * op.m * op.upsilon))


# ---------------------------------------------------------------------------
# comparison detectors
# ---------------------------------------------------------------------------

def square_law_pd(pfa: float, m: int, upsilon: float) -> float:
    """Square-law PD: noncentral chi-squared (2M dof, lambda = 2 M Y) survival at the H0 quantile."""
    if not 0 < pfa <= 1:
        raise DomainError(f"PFA must lie in (0, 1], got {pfa}")
    threshold = float(stats.chi2.isf(pfa, 2 * m))
    if upsilon == 0:
        return float(stats.chi2.sf(threshold, 2 * m))
    return float(stats.ncx2.sf(threshold, 2 * m, 2 * m * upsilon))


def lrt_threshold(pfa: float, deflection_sq: float) -> float:
    """Threshold of the known-parameter log-likelihood ratio (Gaussian, mean -d^2/2, variance d^2)."""
    if not 0 < pfa <= 1:
        raise DomainError(f"PFA must lie in (0, 1], got {pfa}")
    if deflection_sq == 0:
        return 0.0
    return -deflection_sq / 2 + math.sqrt(deflection_sq) * float(stats.norm.isf(pfa))


def lrt_pd(pfa: float, m: int, upsilon: float) -> float:
    """LRT PD = Q(Q^-1(PFA) - sqrt(2 M Y))."""
    if not 0 < pfa <= 1:
        raise DomainError(f"PFA must lie in (0, 1], got {pfa}")
    return float(stats.norm.sf(stats.norm.isf(pfa) - math.sqrt(2 * m * upsilon)))


def pre_glrt_threshold(pfa: float, n_antennas: int, m: int) -> float:
    """H0 quantile of the pre-beamforming statistic, an F(2N, 2N(M-1)) variable."""
    if not 0 < pfa <= 1:
        raise DomainError(f"PFA must lie in (0, 1], got {pfa}")
    return float(stats.f.isf(pfa, 2 * n_antennas, 2 * n_antennas * (m - 1)))


def pre_glrt_pd(pfa: float, n_antennas: int, m: int, snr_n: float) -> float:
    """Pre-beamforming PD for equal per-antenna SNR: noncentral F with lambda = 2 M N SNR_n."""
    threshold = pre_glrt_threshold(pfa, n_antennas, m)
    dfn, dfd = 2 * n_antennas, 2 * n_antennas * (m - 1)
    if snr_n == 0:
        return float(stats.f.sf(threshold, dfn, dfd))
    return float(stats.ncf.sf(threshold, dfn, dfd, 2 * m * n_antennas * snr_n))


def analytic_pd(
    detector: str,
    method: str,
    m: int,
    n_antennas: int,
    pfa: float,
    snr_n: float,
    tol: float = DEFAULT_TOLERANCE,
) -> tuple[float, int | None]:
    """
    Analytic PD for a detector at per-antenna SNR `snr_n` (linear).

    Returns (pd, terms_used); terms_used is only set by the series method.
    """
    upsilon = n_antennas * snr_n
    if detector == "post_glrt":
        op = OperatingPoint.from_pfa(m, pfa, upsilon)
        if method == "series":
            report = pd_series(op, tol)
            return report.pd, report.terms_used
        if method == "quadrature":
            return pd_quadrature(op, tol), None
        if method == "foxh":
            return pd_foxh_for(op, tol=max(tol, 1e-10)), None
        raise DomainError(f"unknown analytic method '{method}' for post_glrt")
    if method != "closed_form":
        raise DomainError(f"detector '{detector}' only has a closed_form analytic PD")
    if detector == "square_law":
        return square_law_pd(pfa, m, upsilon), None
    if detector == "lrt":
        return lrt_pd(pfa, m, upsilon), None
    if detector == "pre_glrt":
        return pre_glrt_pd(pfa, n_antennas, m, snr_n), None
    raise DomainError(f"unknown detector '{detector}'")


def pd_curve(
    detector: str,
    method: str,
    m: int,
    n_antennas: int,
    pfa: float,
    snr_db_grid: Iterable[float],
    tol: float = DEFAULT_TOLERANCE,
) -> dict[float, float]:
    """PD against per-antenna SNR in dB."""
    return {
        float(snr_db): analytic_pd(detector, method, m, n_antennas, pfa, db_to_linear(snr_db), tol)[0]
        for snr_db in snr_db_grid
    }


def snr_for_pd(pd_fn: Callable[[float], float], target_pd: float, lo_db: float, hi_db: float) -> float:
    """SNR (dB) where a continuous, increasing PD function reaches target_pd (Brent's method)."""
    lo_val, hi_val = pd_fn(lo_db) - target_pd, pd_fn(hi_db) - target_pd
    if lo_val > 0 or hi_val < 0:
        raise BracketError(f"PD {target_pd} not attained on [{lo_db}, {hi_db}] dB")
    return float(optimize.brentq(lambda x: pd_fn(x) - target_pd, lo_db, hi_db, xtol=1e-10))


def _crossing(curve: Mapping[float, float], target_pd: float, name: str) -> float:
    snr = np.array(sorted(curve), dtype=float)
    pd = np.array([curve[s] for s in snr], dtype=float)
    if len(snr) < 2:
        raise BracketError(f"{name} curve needs at least two points")
    if np.any(np.diff(pd) < 0):
        raise DomainError(f"{name} curve is not monotone in SNR")
    if not pd[0] <= target_pd <= pd[-1]:
        raise BracketError(f"{name} curve spans PD [{pd[0]:.4g}, {pd[-1]:.4g}] and misses {target_pd}")

    idx = int(np.searchsorted(pd, target_pd, side="left"))
    if pd[idx] == target_pd:
        return float(snr[idx])
    interpolant = interpolate.PchipInterpolator(snr, pd)
    return float(optimize.brentq(lambda x: float(interpolant(x)) - target_pd, snr[idx - 1], snr[idx], xtol=1e-12))


def snr_loss(
    detector_pd_curve: Mapping[float, float],
    reference_pd_curve: Mapping[float, float],
    target_pd: float,
) -> float:
    """
    Extra SNR (dB) a detector needs over the reference to reach target_pd.

    Both curves map SNR in dB to PD and are interpolated monotonically (PCHIP).

    Raises
    ------
    BracketError
        If either curve does not attain target_pd.
    """
    return _crossing(detector_pd_curve, target_pd, "detector") - _crossing(reference_pd_curve, target_pd, "reference")
