"""
Special functions used by the detection-probability formulas.

All functions are pure and thread safe. Real-valued hypergeometric functions are
summed in double precision with term ratios; sums that would overflow are kept
in log space and combined with `scipy.special.logsumexp`.

Accuracy targets
----------------
log_gamma_complex      relative 1e-13 for |z| <= 200
kummer_1f1             relative 1e-12 for 0 <= x <= 100, a <= 200
gauss_2f1_regularized  relative 1e-12 for x < 1 when the transformed series has
                       terms of one sign (the case for every call made by the
                       detection formulas)
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import special as sc

from src.config.settings import HYPERGEOMETRIC_MAX_TERMS, KUMMER_TAYLOR_LIMIT
from src.utils.custom_exception import DomainError, NonConvergence, PoleError
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)

_EPS = np.finfo(float).eps


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def log_gamma_complex(z: complex | ArrayLike) -> complex | np.ndarray:
    """
    Principal branch of log Γ(z) for complex arguments.

    Parameters
    ----------
    z : complex or array_like
        Argument(s). Real inputs are promoted to complex.

    Returns
    -------
    complex or np.ndarray
        log Γ(z), continuous along any path avoiding the non-positive real axis.

    Raises
    ------
    PoleError
        If any argument is 0, -1, -2, ...
    """
    values = np.asarray(z, dtype=complex)
    poles = (values.imag == 0) & (values.real <= 0) & (values.real == np.round(values.real))
    if np.any(poles):
        raise PoleError(f"log-gamma pole at z = {values[poles].ravel()[0]}")

    result = sc.loggamma(values)
    if not np.all(np.isfinite(result)):
        raise DomainError(f"log-gamma is not finite for z = {z}")

    if np.ndim(result) == 0:
        return complex(result)
    return result


def beta_fn(a: float, b: float) -> float:
    """B(a, b) = Γ(a)Γ(b)/Γ(a+b), computed as exp(log B)."""
    if a <= 0 or b <= 0:
        raise DomainError(f"beta function needs positive arguments, got a={a}, b={b}")
    return float(np.exp(sc.betaln(a, b)))


def laguerre(n: int, x: float | ArrayLike) -> float | np.ndarray:
    """
    Laguerre polynomial L_n(x) by the three-term recurrence

        (k+1) L_{k+1}(x) = (2k+1-x) L_k(x) - k L_{k-1}(x).

    Works elementwise on arrays.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"Laguerre degree must be a non-negative integer, got {n}")

    x_arr = np.asarray(x, dtype=float)
    previous = np.ones_like(x_arr)
    if n == 0:
        return float(previous) if previous.ndim == 0 else previous

    current = 1.0 - x_arr
    for k in range(1, int(n)):
        previous, current = current, ((2 * k + 1 - x_arr) * current - k * previous) / (k + 1)

    return float(current) if current.ndim == 0 else current


# ---------------------------------------------------------------------------
# Confluent hypergeometric 1F1
# ---------------------------------------------------------------------------

def _kummer_taylor(a: float, b: float, x: float) -> float:
    term = 1.0
    terms = [term]
    magnitude = 1.0
    for k in range(HYPERGEOMETRIC_MAX_TERMS):
        if a + k == 0:
            return math.fsum(terms)
        ratio = (a + k) * x / ((b + k) * (k + 1))
        term *= ratio
        terms.append(term)
        magnitude += abs(term)
        if abs(ratio) < 1 and abs(term) / (1 - abs(ratio)) <= 0.25 * _EPS * magnitude:
            return math.fsum(terms)
    raise NonConvergence(f"1F1({a}; {b}; {x}) series did not converge in {HYPERGEOMETRIC_MAX_TERMS} terms")


def kummer_1f1(a: float, b: float, x: float) -> float:
    """
    Kummer confluent hypergeometric function 1F1(a; b; x).

    Parameters
    ----------
    a, b : float
        Parameters; b must not be a non-positive integer.
    x : float
        Real argument.

    Returns
    -------
    float

    Raises
    ------
    DomainError
        If b is 0, -1, -2, ...
    NonConvergence
        If the series or the library fallback does not produce a finite value.

    Notes
    -----
    For b = 1 and a positive integer (the detection density case) the identity
    1F1(a; 1; x) = e^x L_{a-1}(-x) is used: for x >= 0 every Laguerre term is
    positive and the recurrence is stable. Negative x is moved to the positive
    axis with Kummer's transformation 1F1(a; b; x) = e^x 1F1(b-a; b; -x).
    Positive arguments up to 30 are summed directly with compensated summation;
    larger ones are handed to `scipy.special.hyp1f1`.
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 undefined for b = {b}")
    if x == 0 or a == 0:
        return 1.0
    if a == b:
        return math.exp(x)
    if _is_nonpositive_integer(a):
        return _kummer_taylor(a, b, x)

    if x < 0:
        return math.exp(x) * kummer_1f1(b - a, b, -x)

    if b == 1 and float(a).is_integer():
        return math.exp(x) * laguerre(int(a) - 1, -x)

    if x <= KUMMER_TAYLOR_LIMIT:
        return _kummer_taylor(a, b, x)

    value = float(sc.hyp1f1(a, b, x))
    if not math.isfinite(value):
        raise NonConvergence(f"1F1({a}; {b}; {x}) is not finite")
    return value


# ---------------------------------------------------------------------------
# Gauss hypergeometric 2F1
# ---------------------------------------------------------------------------

def _log_series_2f1(a: float, b: float, c: float, x: float) -> Tuple[float, float]:
    """Power series of 2F1 in log space; returns (log|F|, sign)."""
    log_terms = [0.0]
    signs = [1.0]
    log_term, sign = 0.0, 1.0
    running = 0.0  # log of the partial sum of |terms|

    for k in range(HYPERGEOMETRIC_MAX_TERMS):
        factor = (a + k) * (b + k) * x / ((c + k) * (k + 1))
        if factor == 0:
            break
        log_term += math.log(abs(factor))
        sign *= math.copysign(1.0, factor)
        log_terms.append(log_term)
        signs.append(sign)
        running = float(np.logaddexp(running, log_term))
        if abs(factor) < 1 and log_term - math.log1p(-abs(factor)) < running + math.log(_EPS) - 2.0:
            break
    else:
        raise NonConvergence(
            f"2F1({a}, {b}; {c}; {x}) series did not converge in {HYPERGEOMETRIC_MAX_TERMS} terms"
        )

    log_value, value_sign = sc.logsumexp(log_terms, b=signs, return_sign=True)
    return float(log_value), float(value_sign)


def log_gauss_2f1(a: float, b: float, c: float, x: float) -> Tuple[float, float]:
    """
    2F1(a, b; c; x) as (log|F|, sign) for x < 1.

    Negative arguments are mapped into (0, 1) with the Pfaff transformation
    variant whose series has terms of one sign. When c-a or c-b is a
    non-positive integer, Euler's transformation turns the function into a
    terminating polynomial with non-negative terms instead.
    """
    if x >= 1:
        raise DomainError(f"2F1 requires x < 1, got {x}")
    if _is_nonpositive_integer(c):
        raise DomainError(f"2F1 undefined for c = {c}; use the regularized form")
    if x == 0 or a == 0 or b == 0:
        return 0.0, 1.0

    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        return _log_series_2f1(a, b, c, x)

    if x < 0:
        for ca, cb in ((c - a, c - b), (c - b, c - a)):
            if _is_nonpositive_integer(cb):
                # Euler: (1-x)^(c-a-b) 2F1(c-a, c-b; c; x)
                log_poly, sign = _log_series_2f1(ca, cb, c, x)
                return (c - a - b) * math.log1p(-x) + log_poly, sign

        z = x / (x - 1.0)
        if c - b > 0 or c - a <= 0:
            # (1-x)^(-a) 2F1(a, c-b; c; x/(x-1))
            log_series, sign = _log_series_2f1(a, c - b, c, z)
            return -a * math.log1p(-x) + log_series, sign
        # (1-x)^(-b) 2F1(c-a, b; c; x/(x-1))
        log_series, sign = _log_series_2f1(c - a, b, c, z)
        return -b * math.log1p(-x) + log_series, sign

    return _log_series_2f1(a, b, c, x)


def gauss_2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for x < 1."""
    log_value, sign = log_gauss_2f1(a, b, c, x)
    return sign * math.exp(log_value)


def gauss_2f1_regularized(a: float, b: float, c: float, x: float) -> float:
    """
    Regularized Gauss hypergeometric function 2F1(a, b; c; x) / Γ(c).

    Parameters
    ----------
    a, b, c : float
        Parameters. For c a non-positive integer -n the finite limit
        (a)_{n+1} (b)_{n+1} x^{n+1} 2F1~(a+n+1, b+n+1; n+2; x) is used.
    x : float
        Argument, x < 1. Values below -1 are handled by transformation.

    Returns
    -------
    float

    Raises
    ------
    DomainError
        If x >= 1.
    NonConvergence
        If the transformed series does not converge.
    """
    if x >= 1:
        raise DomainError(f"2F1 requires x < 1, got {x}")

    if _is_nonpositive_integer(c):
        n = int(-c)
        shift = n + 1
        log_coeff = 0.0
        sign = 1.0
        for j in range(shift):
            factor = (a + j) * (b + j)
            if factor == 0:
                return 0.0
            log_coeff += math.log(abs(factor))
            sign *= math.copysign(1.0, factor)
        if x == 0:
            return 0.0
        log_coeff += shift * math.log(abs(x))
        sign *= math.copysign(1.0, x) ** shift
        return sign * math.exp(log_coeff) * gauss_2f1_regularized(a + shift, b + shift, shift + 1, x)

    log_value, sign = log_gauss_2f1(a, b, c, x)
    log_value -= float(sc.gammaln(c))
    sign *= float(sc.gammasgn(c))
    return sign * math.exp(log_value)
