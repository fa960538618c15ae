import math
import warnings

import numpy as np
import pytest

from src.config.constants import TABLE1_CASES
from src.config.settings import FOXH_TRUNCATION
from src.numerics.analytic import OperatingPoint, db_to_linear, pd_series
from src.numerics.foxh import (
    LOOP,
    VERTICAL,
    FoxHProblem,
    PdFoxHInputs,
    contour_kinds,
    eval_bivariate_h,
    pd_foxh,
    pd_problem,
    select_contours,
)
from src.utils.custom_exception import BranchWarning, DomainError, InfeasibleContour


def _gamma_problem(x, **kwargs):
    # (1/2 pi i) int Gamma(s) x^-s ds = exp(-x)
    return FoxHProblem(x=[x], delta=[0.0], dmat=[[1.0]], **kwargs)


def _inputs(m, pfa, upsilon_db):
    op = OperatingPoint.from_pfa(m, pfa, db_to_linear(upsilon_db))
    return op, PdFoxHInputs.from_operating_point(op.m, op.upsilon, op.omega)


class TestUnivariate:
    def test_exponential(self):
        value = eval_bivariate_h(_gamma_problem(2.0))
        assert value.real == pytest.approx(math.exp(-2.0), abs=1e-9)
        assert abs(value.imag) < 1e-9

    def test_negative_argument_uses_loop(self):
        problem = _gamma_problem(-1.5)
        assert contour_kinds(problem) == [LOOP]
        value = eval_bivariate_h(problem)
        assert value.real == pytest.approx(math.exp(1.5), rel=1e-8)

    def test_log_scale(self):
        value = eval_bivariate_h(_gamma_problem(2.0), log_scale=2.0)
        assert value.real == pytest.approx(1.0, abs=1e-8)

    def test_zero_argument_collapses_axis(self):
        problem = FoxHProblem(x=[0.0, 2.0], delta=[0.0, 0.0], dmat=[[1, 0], [0, 1]])
        value = eval_bivariate_h(problem)
        assert value.real == pytest.approx(math.exp(-2.0), abs=1e-9)


class TestContours:
    """Contour shape and offset selection."""

    def test_pd_problem_kinds(self):
        _, inputs = _inputs(50, 1e-8, -10.0)
        assert contour_kinds(pd_problem(inputs)) == [VERTICAL, LOOP]

    def test_midpoint_offsets(self):
        _, inputs = _inputs(50, 1e-8, -10.0)
        offsets = select_contours(pd_problem(inputs), strategy="midpoint")
        assert offsets == pytest.approx((24.5, 12.75))

    def test_saddle_offsets_are_feasible(self):
        _, inputs = _inputs(50, 1e-6, -5.0)
        problem = pd_problem(inputs)
        offsets = np.asarray(select_contours(problem, strategy="saddle"))
        assert np.all(problem.delta + problem.dmat @ offsets > 0)

    def test_forced_vertical_warns(self):
        problem = _gamma_problem(-1.5, contour_kinds=[VERTICAL])
        with pytest.warns(BranchWarning):
            assert contour_kinds(problem) == [VERTICAL]

    def test_no_warning_for_convergent_axis(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", BranchWarning)
            assert contour_kinds(_gamma_problem(2.0)) == [VERTICAL]

    def test_offsets_on_the_wrong_side(self):
        with pytest.raises(InfeasibleContour):
            _gamma_problem(2.0, contour_offsets=[-0.5])

    def test_empty_interval(self):
        problem = FoxHProblem(x=[1.0], delta=[0.0, -1.0], dmat=[[1.0], [-1.0]])
        with pytest.raises(InfeasibleContour):
            select_contours(problem)

    def test_unknown_strategy(self):
        with pytest.raises(DomainError):
            select_contours(_gamma_problem(1.0), strategy="steepest")


class TestProblemValidation:
    def test_three_variables(self):
        with pytest.raises(DomainError):
            FoxHProblem(x=[1.0, 1.0, 1.0], delta=[0.0], dmat=[[1, 1, 1]])

    def test_bad_truncation(self):
        with pytest.raises(DomainError):
            _gamma_problem(1.0, truncation=0.0)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            _gamma_problem(1.0, contour_kinds=["spiral"])

    def test_bad_tolerance(self):
        with pytest.raises(DomainError):
            eval_bivariate_h(_gamma_problem(1.0), tol=0.0)

    def test_inconsistent_phi(self):
        with pytest.raises(DomainError):
            PdFoxHInputs(m=10, upsilon=0.1, omega=1.0, phi=1.0)


class TestDetectionProbability:
    @pytest.mark.slow
    @pytest.mark.parametrize("row", TABLE1_CASES)
    def test_matches_series(self, row):
        m, pfa, upsilon_db, _, _ = row
        op, inputs = _inputs(m, pfa, upsilon_db)
        assert pd_foxh(inputs, tol=1e-10) == pytest.approx(pd_series(op).pd, abs=1e-6)

    @pytest.mark.slow
    @pytest.mark.parametrize("row", TABLE1_CASES)
    def test_stable_when_truncation_doubles(self, row):
        m, pfa, upsilon_db, _, _ = row
        _, inputs = _inputs(m, pfa, upsilon_db)
        base = pd_foxh(inputs, tol=1e-10)
        doubled = pd_foxh(inputs, tol=1e-10, truncation=2 * FOXH_TRUNCATION)
        assert abs(doubled - base) <= 1e-9 * abs(base)
