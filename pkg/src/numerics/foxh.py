"""
Numerical evaluation of (bi)variate Fox H-functions by Mellin-Barnes contour
quadrature, and the closed-form PD of the post-beamforming GLRT detector.

A problem is described by

    H = (1/(2 pi i))^L  int  Theta(s) prod_k x_k^(-s_k) ds,

    Theta(s) = prod_i Gamma(delta_i + sum_k d_ik s_k) / prod_j Gamma(beta_j + sum_k b_jk s_k).

Every numerator gamma must have a positive real argument on the contour, which
separates the left and right pole sequences. Along a vertical line the
integrand of axis k decays like exp(-(pi Delta_k/2 - |arg x_k|) |Im s_k|) with
Delta_k = sum_i |d_ik| - sum_j |b_jk|; when that rate is not positive the axis
is integrated along a parabola opening to the left instead,

    s = xi + i tau - kappa tau^2,

which converges whenever mu_k = sum_i d_ik - sum_j b_jk > 0. Powers of negative
arguments use the principal branch, (-|x|)^(-s) = exp(-s (ln|x| + i pi)).

The integral is iterated: the first axis is the outer integral and each inner
integral is memoized per outer node for the duration of one evaluation. Both
levels use adaptive Gauss-Kronrod (`scipy.integrate.quad_vec`).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy import special as sc

from src.config.settings import FOXH_LOG_LIMIT, FOXH_LOOP_CURVATURE, FOXH_TRUNCATION
from src.numerics.special_functions import log_gamma_complex
from src.utils.custom_exception import (
    BranchWarning,
    DomainError,
    ImaginaryResidue,
    InfeasibleContour,
    NonConvergence,
    PoleError,
)
from src.utils.custom_logger import get_logger

logger = get_logger(__name__)

VERTICAL = "vertical"
LOOP = "loop"


@dataclass
class FoxHProblem:
    """
    Coefficients of an L-variate Fox H-function (L = 1 or 2).

    Attributes
    ----------
    x : array of L reals (may be negative or zero).
    delta, dmat : numerator gamma offsets (m,) and coefficients (m, L).
    beta, bmat : denominator gamma offsets (n,) and coefficients (n, L).
    contour_offsets : real parts of the contours; chosen by `select_contours` when None.
    truncation : half-length W of the contour parameter range [-W, W].
    contour_kinds : "vertical" / "loop" per axis; chosen automatically when None.
    curvature : kappa of the loop contours.
    """

    x: np.ndarray
    delta: np.ndarray
    dmat: np.ndarray
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bmat: np.ndarray = field(default_factory=lambda: np.zeros((0, 1)))
    contour_offsets: Optional[Sequence[float]] = None
    truncation: float = FOXH_TRUNCATION
    contour_kinds: Optional[Sequence[str]] = None
    curvature: float = FOXH_LOOP_CURVATURE

    def __post_init__(self) -> None:
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        n_vars = self.x.size
        self.delta = np.atleast_1d(np.asarray(self.delta, dtype=float))
        self.dmat = np.asarray(self.dmat, dtype=float).reshape(len(self.delta), n_vars)
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        self.bmat = np.asarray(self.bmat, dtype=float).reshape(len(self.beta), n_vars)

        if n_vars not in (1, 2):
            raise DomainError(f"only univariate and bivariate problems are supported, got L={n_vars}")
        if self.truncation <= 0:
            raise DomainError(f"truncation must be > 0, got {self.truncation}")
        if self.curvature <= 0:
            raise DomainError(f"loop curvature must be > 0, got {self.curvature}")
        if self.contour_kinds is not None:
            if len(self.contour_kinds) != n_vars or any(k not in (VERTICAL, LOOP) for k in self.contour_kinds):
                raise DomainError(f"contour kinds must be {n_vars} of ('vertical', 'loop'), got {self.contour_kinds}")
        if self.contour_offsets is not None:
            offsets = np.asarray(self.contour_offsets, dtype=float)
            if offsets.size != n_vars:
                raise DomainError(f"expected {n_vars} contour offsets, got {offsets.size}")
            margins = self.delta + self.dmat @ offsets
            if np.any(margins <= 0):
                raise InfeasibleContour(f"contour offsets {offsets.tolist()} do not separate the poles")

    @property
    def n_vars(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class PdFoxHInputs:
    """Inputs of the Fox H form of PD; phi = Omega^(M-1) exp(-Y M) / Gamma(M-1)."""

    m: int
    upsilon: float
    omega: float
    phi: float

    def __post_init__(self) -> None:
        if self.m < 2:
            raise DomainError(f"M must be >= 2, got {self.m}")
        if self.upsilon < 0 or self.omega <= 0:
            raise DomainError(f"need upsilon >= 0 and omega > 0, got ({self.upsilon}, {self.omega})")
        expected = math.exp(self.log_phi)
        if not math.isclose(self.phi, expected, rel_tol=1e-12, abs_tol=1e-300):
            raise DomainError(f"phi {self.phi} inconsistent with (M, upsilon, omega); expected {expected}")

    @property
    def log_phi(self) -> float:
        return (self.m - 1) * math.log(self.omega) - self.upsilon * self.m - float(sc.gammaln(self.m - 1))

    @classmethod
    def from_operating_point(cls, m: int, upsilon: float, omega: float) -> "PdFoxHInputs":
        log_phi = (m - 1) * math.log(omega) - upsilon * m - float(sc.gammaln(m - 1))
        return cls(m=m, upsilon=upsilon, omega=omega, phi=math.exp(log_phi))


def pd_problem(inputs: PdFoxHInputs) -> FoxHProblem:
    """Coefficient structure of the bivariate H in the PD closed form."""
    m = inputs.m
    return FoxHProblem(
        x=[inputs.omega, -inputs.upsilon * m],
        delta=[0.0, 0.0, m - 1.0, float(m)],
        dmat=[[1, 0], [0, 1], [-1, 0], [-1, -1]],
        beta=[float(m), 1.0],
        bmat=[[-1, 0], [0, -1]],
    )


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------

def _log_x(x: np.ndarray) -> np.ndarray:
    """Principal-branch logarithm of the (real, non-zero) arguments."""
    return np.log(np.abs(x)) + 1j * np.pi * (x < 0)


def log_kernel(problem: FoxHProblem, s: Sequence[complex]) -> complex:
    """log Theta(s) evaluated in log space; denominator poles give -inf."""
    s_arr = np.asarray(s, dtype=complex)
    numerator = problem.delta + problem.dmat @ s_arr
    total = complex(np.sum(log_gamma_complex(numerator))) if numerator.size else 0j
    if problem.beta.size:
        denominator = problem.beta + problem.bmat @ s_arr
        try:
            total -= complex(np.sum(log_gamma_complex(denominator)))
        except PoleError:
            return complex(-math.inf)
    return total


def _log_integrand(problem: FoxHProblem, s: np.ndarray, log_x: np.ndarray) -> complex:
    return log_kernel(problem, s) - complex(np.dot(s, log_x))


# ---------------------------------------------------------------------------
# contour geometry
# ---------------------------------------------------------------------------

def contour_kinds(problem: FoxHProblem) -> list[str]:
    """
    Contour shape per axis: a vertical line when |arg x_k| < pi Delta_k / 2,
    otherwise a left-opening loop. A forced vertical line on a divergent axis
    emits `BranchWarning`.

    Raises
    ------
    NonConvergence
        If an axis needs a loop but mu_k <= 0.
    """
    kinds = []
    for k in range(problem.n_vars):
        spread = np.abs(problem.dmat[:, k]).sum() - np.abs(problem.bmat[:, k]).sum()
        balance = problem.dmat[:, k].sum() - problem.bmat[:, k].sum()
        arg = math.pi if problem.x[k] < 0 else 0.0
        vertical_ok = arg < math.pi * spread / 2

        if problem.contour_kinds is not None:
            kind = problem.contour_kinds[k]
            if kind == VERTICAL and not vertical_ok:
                warnings.warn(
                    f"axis {k}: vertical contour diverges (|arg x|={arg:.4f} >= pi*{spread}/2)",
                    BranchWarning,
                    stacklevel=2,
                )
            kinds.append(kind)
            continue

        if vertical_ok:
            kinds.append(VERTICAL)
        elif balance > 0:
            kinds.append(LOOP)
        else:
            raise NonConvergence(f"axis {k}: no convergent contour (Delta={spread}, mu={balance}, x={problem.x[k]})")
    return kinds


def _path(kind: str, offset: float, curvature: float, tau: float) -> tuple[complex, complex]:
    """Point on the contour and ds/dtau."""
    if kind == VERTICAL:
        return complex(offset, tau), 1j
    return complex(offset - curvature * tau * tau, tau), complex(-2.0 * curvature * tau, 1.0)


class _ContourIntegrator:
    """Integrand evaluation and quadrature along the contours of one problem."""

    def __init__(self, problem: FoxHProblem, kinds: Sequence[str], log_scale: float = 0.0) -> None:
        self.problem = problem
        self.kinds = list(kinds)
        self.log_x = _log_x(problem.x)
        self.width = problem.truncation
        # (1/(2 pi))^L; the 1/i^L part is applied to the jacobian
        self.log_norm = log_scale - problem.n_vars * math.log(2 * math.pi)
        self.peak = -math.inf

    def log_value(self, s: np.ndarray) -> complex:
        return _log_integrand(self.problem, s, self.log_x) + self.log_norm

    def point(self, s: np.ndarray, jacobian: complex, shift: float = 0.0) -> np.ndarray:
        log_value = self.log_value(s)
        if log_value.real == -math.inf:
            return np.zeros(2)
        self.peak = max(self.peak, log_value.real)
        value = np.exp(log_value - shift) * jacobian / (1j ** self.problem.n_vars)
        return np.array([value.real, value.imag])

    def quad(self, fn, epsabs: float, epsrel: float = 1e-12) -> np.ndarray:
        res, err, info = integrate.quad_vec(
            fn, -self.width, self.width, epsabs=epsabs, epsrel=epsrel, points=(0.0,), full_output=True, limit=2000
        )
        if info.status == 2 or not np.all(np.isfinite(res)):
            raise NonConvergence("contour integrand is not finite; the contour crosses an overflow region")
        if info.status == 1 and err > max(epsabs, epsrel * float(np.linalg.norm(res))):
            raise NonConvergence(f"contour quadrature stopped at error {err:.3e} > {epsabs:.1e}")
        return res

    def last_axis(self, prefix: Sequence[complex], jacobian: complex, offset: float, epsabs: float,
                  shift: float = 0.0, epsrel: float = 1e-12) -> np.ndarray:
        """Integral over the last axis with the earlier variables fixed at `prefix`."""
        kind = self.kinds[len(prefix)]

        def integrand(tau: float) -> np.ndarray:
            s_last, ds = _path(kind, offset, self.problem.curvature, tau)
            return self.point(np.array([*prefix, s_last]), jacobian * ds, shift)

        return self.quad(integrand, epsabs, epsrel)


# ---------------------------------------------------------------------------
# contour selection
# ---------------------------------------------------------------------------

def _feasible_interval(problem: FoxHProblem, axis: int, fixed: Sequence[float]) -> tuple[float, float]:
    """Open interval of offsets for `axis` given offsets already fixed for earlier axes."""
    lo, hi = -math.inf, math.inf
    for offset, row in zip(problem.delta, problem.dmat):
        if row[axis] == 0 or np.any(row[axis + 1:] != 0):
            continue
        rhs = -(offset + float(np.dot(row[:axis], fixed)))
        bound = rhs / row[axis]
        if row[axis] > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    if not lo < hi:
        raise InfeasibleContour(f"axis {axis}: empty offset interval ({lo}, {hi})")
    return lo, hi


def _midpoint(lo: float, hi: float) -> float:
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def _loop_offset(lo: float, hi: float) -> float:
    if math.isinf(lo):
        return _midpoint(lo, hi)
    if math.isinf(hi):
        return lo + 0.5
    return lo + min(0.5, (hi - lo) / 2)


def _complete_offsets(problem: FoxHProblem, prefix: list[float], kinds: Sequence[str]) -> list[float]:
    offsets = list(prefix)
    for k in range(len(prefix), problem.n_vars):
        lo, hi = _feasible_interval(problem, k, offsets)
        offsets.append(_loop_offset(lo, hi) if kinds[k] == LOOP else _midpoint(lo, hi))
    return offsets


def _saddle_objective(problem: FoxHProblem, kinds: Sequence[str], prefix: list[float]):
    """log|integrand| on the real axis, with later axes integrated out when there are any."""
    integrator = _ContourIntegrator(problem, kinds)

    def objective(xi: float) -> float:
        offsets = _complete_offsets(problem, prefix + [xi], kinds)
        real_point = np.asarray(offsets, dtype=complex)
        anchor = integrator.log_value(real_point).real
        if not math.isfinite(anchor):
            return 1e300
        if len(offsets) == len(prefix) + 1:
            return anchor
        # one remaining axis (bivariate problem): integrate it at the real point
        res = integrator.last_axis(real_point[:-1], 1j, offsets[-1], epsabs=1e-300, shift=anchor, epsrel=1e-6)
        magnitude = float(np.hypot(res[0], res[1]))
        if magnitude == 0:
            return 1e300
        return anchor + math.log(magnitude)

    return objective


def select_contours(problem: FoxHProblem, strategy: str = "midpoint") -> tuple[float, ...]:
    """
    Contour offsets separating the pole sequences.

    Axes are processed in order. For axis k only the constraints that involve
    axis k and earlier (already fixed) axes are used, each giving a half-line;
    their intersection is an open interval.

    strategy
        "midpoint" takes the middle of each interval (one unit inside for
        half-lines). "saddle" places vertical contours at the minimum over the
        interval of the real-axis integrand magnitude (inner axes integrated
        out), where the integrand along the line does not oscillate, and loop
        contours half a unit right of their left constraint.

    Raises
    ------
    InfeasibleContour
        If some interval is empty or the completed offsets violate a constraint.
    """
    if strategy not in ("midpoint", "saddle"):
        raise DomainError(f"unknown contour strategy '{strategy}'")

    offsets: list[float] = []
    if strategy == "midpoint":
        for k in range(problem.n_vars):
            offsets.append(_midpoint(*_feasible_interval(problem, k, offsets)))
    else:
        kinds = contour_kinds(problem)
        for k in range(problem.n_vars):
            lo, hi = _feasible_interval(problem, k, offsets)
            if kinds[k] == LOOP:
                offsets.append(_loop_offset(lo, hi))
                continue

            search_lo = lo if not math.isinf(lo) else hi - 50.0
            search_hi = hi if not math.isinf(hi) else lo + 50.0
            margin = 1e-6 * (search_hi - search_lo)
            result = optimize.minimize_scalar(
                _saddle_objective(problem, kinds, offsets),
                bounds=(search_lo + margin, search_hi - margin),
                method="bounded",
                options={"xatol": 1e-4},
            )
            offsets.append(float(result.x))

    margins = problem.delta + problem.dmat @ np.asarray(offsets)
    if np.any(margins <= 0):
        raise InfeasibleContour(f"offsets {offsets} violate the pole-separation constraints")
    logger.debug(f"contour offsets ({strategy}): {offsets}")
    return tuple(offsets)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class _ReducedProblem(FoxHProblem):
    """Problem that may have no integration variables left."""

    def __post_init__(self) -> None:
        if np.asarray(self.x).size == 0:
            self.x = np.zeros(0)
            self.delta = np.atleast_1d(np.asarray(self.delta, dtype=float))
            self.dmat = np.zeros((self.delta.size, 0))
            self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
            self.bmat = np.zeros((self.beta.size, 0))
            return
        super().__post_init__()


def _reduce_zero_arguments(problem: FoxHProblem) -> FoxHProblem:
    """
    Remove axes with x_k = 0: only the residue of Gamma(s_k) at s_k = 0 survives,
    so that gamma factor is dropped and s_k is set to zero everywhere else.
    """
    zero_axes = [k for k in range(problem.n_vars) if problem.x[k] == 0]
    if not zero_axes:
        return problem

    keep_rows = np.ones(len(problem.delta), dtype=bool)
    for k in zero_axes:
        unit = np.zeros(problem.n_vars)
        unit[k] = 1.0
        matches = [
            i for i in range(len(problem.delta))
            if keep_rows[i] and problem.delta[i] == 0 and np.array_equal(problem.dmat[i], unit)
        ]
        if not matches:
            raise DomainError(f"x_{k} = 0 needs a Gamma(s_{k}) factor to collapse the axis")
        keep_rows[matches[0]] = False

    live = [k for k in range(problem.n_vars) if k not in zero_axes]
    offsets = None if problem.contour_offsets is None else [problem.contour_offsets[k] for k in live]
    kinds = None if problem.contour_kinds is None else [problem.contour_kinds[k] for k in live]

    return _ReducedProblem(
        x=problem.x[live],
        delta=problem.delta[keep_rows],
        dmat=problem.dmat[keep_rows][:, live],
        beta=problem.beta,
        bmat=problem.bmat[:, live],
        contour_offsets=offsets,
        truncation=problem.truncation,
        contour_kinds=kinds,
        curvature=problem.curvature,
    )


def _integrate(problem: FoxHProblem, tol: float, log_scale: float, strategy: str) -> complex:
    """exp(log_scale) * H for a problem without zero arguments."""
    if problem.n_vars == 0:
        return complex(np.exp(log_scale + log_kernel(problem, [])))

    kinds = contour_kinds(problem)
    if problem.contour_offsets is not None:
        offsets = tuple(float(v) for v in problem.contour_offsets)
    else:
        offsets = select_contours(problem, strategy=strategy)

    integrator = _ContourIntegrator(problem, kinds, log_scale)

    if problem.n_vars == 1:
        result = integrator.last_axis([], 1.0, offsets[0], epsabs=tol)
    else:
        @lru_cache(maxsize=None)
        def inner(tau1: float) -> tuple[float, float]:
            s1, ds1 = _path(kinds[0], offsets[0], problem.curvature, tau1)
            res = integrator.last_axis([s1], ds1, offsets[1], epsabs=tol / 20)
            return float(res[0]), float(res[1])

        result = integrator.quad(lambda tau1: np.array(inner(float(tau1))), tol)
        logger.debug(f"outer contour used {inner.cache_info().currsize} inner integrals")

    if integrator.peak > FOXH_LOG_LIMIT:
        warnings.warn(f"contour integrand reached exp({integrator.peak:.1f})", BranchWarning, stacklevel=2)

    return complex(result[0], result[1])


def eval_bivariate_h(
    problem: FoxHProblem,
    tol: float = 1e-10,
    log_scale: float = 0.0,
    strategy: str = "midpoint",
) -> complex:
    """
    Evaluate exp(log_scale) * H for a univariate or bivariate problem.

    Parameters
    ----------
    problem : FoxHProblem
    tol : float
        Absolute tolerance on the scaled result.
    log_scale : float
        Log of a prefactor applied inside the integrand, so that a huge H times
        a tiny prefactor is integrated at order one.
    strategy : str
        Offset rule when the problem carries no offsets ("midpoint" or "saddle").

    Raises
    ------
    NonConvergence, InfeasibleContour
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be > 0, got {tol}")
    reduced = _reduce_zero_arguments(problem)
    return _integrate(reduced, tol, log_scale, strategy)


def pd_foxh(inputs: PdFoxHInputs, tol: float = 1e-10, truncation: float | None = None) -> float:
    """
    PD = Phi * H[(Omega, -Y M)] with saddle-placed contours.

    Raises
    ------
    ImaginaryResidue
        If the imaginary part of the result exceeds tol.
    """
    problem = pd_problem(inputs)
    if truncation is not None:
        problem.truncation = truncation
    value = eval_bivariate_h(problem, tol=tol, log_scale=inputs.log_phi, strategy="saddle")
    if abs(value.imag) > tol:
        raise ImaginaryResidue(f"PD contour integral has imaginary part {value.imag:.3e} > {tol:.1e}")
    return min(max(value.real, 0.0), 1.0)
