"""
Densities and tail probabilities of the post-beamforming detection statistic Z.

Under H0 the statistic is central F with (2, 2(M-1)) degrees of freedom, so its
density reduces to ((M-1)/(M+z-1))^M. Under H1 it is a doubly noncentral F
with lambda2 = 0, whose double series collapses to a single 1F1. The double
series itself is kept as an independent evaluation of the same law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate, stats
from scipy import special as sc

from src.config.settings import DNF_MAX_SHELLS, DNF_REL_TOL, QUAD_LIMIT
from src.numerics.special_functions import kummer_1f1, laguerre
from src.utils.custom_exception import DomainError, NonConvergence
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class H0Law:
    """Law of Z under H0 for M samples."""

    m: int

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"H0Law needs an integer m >= 2, got {self.m}")


@dataclass(frozen=True)
class H1Law:
    """Law of Z under H1 for M samples and aggregate SNR upsilon."""

    m: int
    upsilon: float

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 2:
            raise DomainError(f"H1Law needs an integer m >= 2, got {self.m}")
        if not self.upsilon >= 0:
            raise DomainError(f"H1Law needs upsilon >= 0, got {self.upsilon}")

    @property
    def noncentrality(self) -> float:
        """Numerator noncentrality 2*M*upsilon."""
        return 2.0 * self.m * self.upsilon


@dataclass(frozen=True)
class DoublyNoncentralF:
    """Ratio (chi2(alpha1, lambda1)/alpha1) / (chi2(alpha2, lambda2)/alpha2)."""

    alpha1: int
    alpha2: int
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self) -> None:
        for alpha in (self.alpha1, self.alpha2):
            if isinstance(alpha, bool) or not isinstance(alpha, (int, np.integer)):
                raise DomainError(f"degrees of freedom must be integers, got {alpha!r}")
        if self.alpha1 <= 0 or self.alpha2 <= 0:
            raise DomainError(f"degrees of freedom must be positive, got ({self.alpha1}, {self.alpha2})")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise DomainError(f"noncentralities must be >= 0, got ({self.lambda1}, {self.lambda2})")


def _check_support(z: np.ndarray) -> None:
    if np.any(z < 0) or np.any(np.isnan(z)):
        raise DomainError("density argument must satisfy z >= 0")


def _scalar_or_array(values: np.ndarray) -> float | np.ndarray:
    return float(values) if values.ndim == 0 else values


def pdf_h0(z: float | ArrayLike, law: H0Law) -> float | np.ndarray:
    """f_Z(z | H0) = ((M-1)/(M+z-1))^M."""
    z_arr = np.asarray(z, dtype=float)
    _check_support(z_arr)
    m = law.m
    return _scalar_or_array(((m - 1) / (m + z_arr - 1)) ** m)


def cdf_h0(z: float | ArrayLike, law: H0Law) -> float | np.ndarray:
    """P(Z <= z | H0) = 1 - ((M-1)/(M+z-1))^(M-1)."""
    z_arr = np.asarray(z, dtype=float)
    _check_support(z_arr)
    m = law.m
    return _scalar_or_array(-np.expm1((m - 1) * np.log((m - 1) / (m + z_arr - 1))))


def pdf_h1(z: float | ArrayLike, law: H1Law) -> float | np.ndarray:
    """
    f_Z(z | H1) = exp(-Y M) ((M-1)/(M+z-1))^M 1F1(M; 1; Y z M / (M+z-1)).

    With upsilon = 0 the 1F1 factor and the exponential are exactly one, so the
    result coincides with `pdf_h0` bit for bit.
    """
    z_arr = np.asarray(z, dtype=float)
    base = np.asarray(pdf_h0(z_arr, H0Law(law.m)), dtype=float)
    m, ups = law.m, law.upsilon
    arguments = ups * z_arr * m / (m + z_arr - 1)

    scale = math.exp(-ups * m)
    kummer = np.vectorize(lambda x: kummer_1f1(m, 1, float(x)), otypes=[float])(arguments)
    return _scalar_or_array(base * (scale * kummer))


def sf_h1(z: float, law: H1Law, tol: float = 1e-10) -> float:
    """
    P(Z > z | H1) by adaptive quadrature.

    The substitution u = (M-1)/(M+z-1) maps [z, inf) onto (0, u_z], where the
    integrand becomes (M-1) u^(M-2) exp(-Y M u) L_{M-1}(-Y M (1-u)).
    """
    if z < 0:
        raise DomainError(f"survival argument must be >= 0, got {z}")
    m, ups = law.m, law.upsilon
    upper = (m - 1) / (m + z - 1)
    ym = ups * m

    def integrand(u: float) -> float:
        return (m - 1) * u ** (m - 2) * math.exp(-ym * u) * laguerre(m - 1, -ym * (1.0 - u))

    result = integrate.quad(integrand, 0.0, upper, epsabs=tol, epsrel=1e-13, limit=QUAD_LIMIT, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) == 4 and abserr > tol:
        raise NonConvergence(f"survival quadrature reached error {abserr:.3e} > {tol:.1e}: {result[3]}")
    return min(max(value, 0.0), 1.0)


def _log_dnf_term(k: int, l: int, log_z: float, log_sum: float, law: DoublyNoncentralF) -> float:
    """Log of the (k, l) term of the doubly noncentral F double series."""
    a1, a2 = law.alpha1, law.alpha2
    power = a1 / 2 + k - 1
    if log_z == -math.inf:
        if power > 0:
            return -math.inf
        z_part = 0.0 if power == 0 else math.inf
    else:
        z_part = power * log_z

    value = (
        z_part
        + (a1 / 2 + k) * (math.log(a1) - log_sum)
        + (a2 / 2 + l) * (math.log(a2) - log_sum)
        - (law.lambda1 + law.lambda2) / 2
        - sc.gammaln(k + 1)
        - sc.gammaln(l + 1)
        - sc.betaln(k + a1 / 2, l + a2 / 2)
    )
    if k:
        value += k * math.log(law.lambda1 / 2)
    if l:
        value += l * math.log(law.lambda2 / 2)
    return value


def doubly_noncentral_f_pdf(z: float, law: DoublyNoncentralF) -> float:
    """
    Density of the doubly noncentral F law by its double Poisson series.

    The (k, l) terms are summed over diagonal shells n = k + l in log space;
    summation stops once the shells are decreasing and a full shell adds less
    than `DNF_REL_TOL` relative to the running total.

    Raises
    ------
    DomainError
        If z < 0.
    NonConvergence
        If `DNF_MAX_SHELLS` shells do not reach the tolerance.
    """
    if z < 0:
        raise DomainError(f"density argument must satisfy z >= 0, got {z}")

    log_z = math.log(z) if z > 0 else -math.inf
    log_sum = math.log(law.alpha1 * z + law.alpha2)
    k_active = law.lambda1 > 0
    l_active = law.lambda2 > 0

    total = -math.inf
    previous_shell = -math.inf
    log_rel_tol = math.log(DNF_REL_TOL)

    for n in range(DNF_MAX_SHELLS):
        if n and not (k_active or l_active):
            break
        ks = range(0, n + 1)
        if not k_active:
            ks = range(0, 1)
        elif not l_active:
            ks = range(n, n + 1)

        shell_terms = [_log_dnf_term(k, n - k, log_z, log_sum, law) for k in ks if (n - k == 0 or l_active)]
        shell = float(sc.logsumexp(shell_terms)) if shell_terms else -math.inf
        if shell == math.inf:
            return math.inf
        total = float(np.logaddexp(total, shell))

        if n > 0 and shell <= previous_shell and shell < total + log_rel_tol:
            logger.debug(f"doubly noncentral F series stopped after {n + 1} shells")
            return math.exp(total)
        if total == -math.inf and n > 0:
            return 0.0
        previous_shell = shell

    else:
        raise NonConvergence(f"doubly noncentral F series exceeded {DNF_MAX_SHELLS} shells at z={z}")

    return math.exp(total)


def chi2_cdf(x: float, dof: int) -> float:
    """Central chi-squared CDF."""
    if x < 0:
        raise DomainError(f"chi-squared CDF needs x >= 0, got {x}")
    return float(stats.chi2.cdf(x, dof))


def chi2_sf(x: float, dof: int) -> float:
    """Central chi-squared survival function."""
    if x < 0:
        raise DomainError(f"chi-squared survival needs x >= 0, got {x}")
    return float(stats.chi2.sf(x, dof))


def noncentral_chi2_cdf(x: float, dof: int, lam: float) -> float:
    """Noncentral chi-squared CDF; lam = 0 returns `chi2_cdf` exactly."""
    if x < 0:
        raise DomainError(f"chi-squared CDF needs x >= 0, got {x}")
    if lam < 0:
        raise DomainError(f"noncentrality must be >= 0, got {lam}")
    if lam == 0:
        return chi2_cdf(x, dof)
    return float(stats.ncx2.cdf(x, dof, lam))


def noncentral_chi2_sf(x: float, dof: int, lam: float) -> float:
    """Noncentral chi-squared survival function; lam = 0 returns `chi2_sf` exactly."""
    if x < 0:
        raise DomainError(f"chi-squared survival needs x >= 0, got {x}")
    if lam < 0:
        raise DomainError(f"noncentrality must be >= 0, got {lam}")
    if lam == 0:
        return chi2_sf(x, dof)
    return float(stats.ncx2.sf(x, dof, lam))
