import math

import mpmath
import numpy as np
import pytest
from scipy import special as sc

from src.numerics.special_functions import (
    beta_fn,
    gauss_2f1,
    gauss_2f1_regularized,
    kummer_1f1,
    laguerre,
    log_gamma_complex,
    log_gauss_2f1,
)
from src.utils.custom_exception import DomainError, PoleError

mpmath.mp.dps = 40


def _rel(a, b):
    return abs(a - b) / abs(b)


class TestLogGamma:
    """Principal-branch log-gamma against mpmath."""

    @pytest.mark.parametrize("z", [0.5, 1.0, 7.25, 3 + 4j, -2.5 + 0.1j, 0.1 - 30j, 150 + 20j, -40.5 + 3j])
    def test_matches_mpmath(self, z):
        ref = complex(mpmath.loggamma(mpmath.mpc(z)))
        got = log_gamma_complex(z)
        assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_integer_values(self):
        for n in range(1, 20):
            assert log_gamma_complex(n).real == pytest.approx(math.lgamma(n), rel=1e-14, abs=1e-14)

    @pytest.mark.parametrize("z", [0, -1, -3, -17])
    def test_poles_raise(self, z):
        with pytest.raises(PoleError):
            log_gamma_complex(z)

    def test_recurrence(self):
        # log Gamma(z+1) - log Gamma(z) = log z, up to a multiple of 2 pi i
        rng = np.random.default_rng(2024)
        z = rng.uniform(-20, 20, 1000) + 1j * rng.uniform(-20, 20, 1000)
        z = z[np.abs(z.imag) > 0.05]
        gap = log_gamma_complex(z + 1) - log_gamma_complex(z) - np.log(z)
        np.testing.assert_allclose(gap.real, 0.0, atol=1e-9)
        turns = gap.imag / (2 * np.pi)
        np.testing.assert_allclose(turns, np.round(turns), atol=1e-9)

    def test_array_input(self):
        z = np.array([1.5 + 2j, 4.0 + 0j, 0.25 - 1j])
        got = log_gamma_complex(z)
        assert got.shape == (3,)
        np.testing.assert_allclose(got, sc.loggamma(z), rtol=1e-14)


class TestBetaAndLaguerre:
    def test_beta(self):
        assert beta_fn(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-14)
        with pytest.raises(DomainError):
            beta_fn(0.0, 1.0)

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 21, 49, 99])
    def test_laguerre_negative_axis(self, n):
        for x in (-0.0, -0.5, -3.0, -25.0):
            ref = float(mpmath.laguerre(n, 0, x))
            assert laguerre(n, x) == pytest.approx(ref, rel=1e-12)

    def test_laguerre_low_degrees(self):
        x = 0.7
        assert laguerre(0, x) == 1.0
        assert laguerre(1, x) == pytest.approx(1 - x)
        assert laguerre(2, x) == pytest.approx((x * x - 4 * x + 2) / 2)

    def test_laguerre_vectorised(self):
        x = np.linspace(-10, 0, 11)
        np.testing.assert_allclose(laguerre(12, x), sc.eval_laguerre(12, x), rtol=1e-12)

    def test_laguerre_negative_degree(self):
        with pytest.raises(DomainError):
            laguerre(-1, 0.5)


class TestKummer:
    """1F1 on the paths used by the detection densities and the general fallback."""

    @pytest.mark.parametrize(
        "a,b,x",
        [
            (1, 1, 3.0),
            (5, 1, 0.1),
            (50, 1, 12.5),
            (100, 1, 40.0),
            (0.5, 2.5, 20.0),
            (3, 7, 60.0),
            (2.5, 1.5, -8.0),
        ],
    )
    def test_matches_mpmath(self, a, b, x):
        ref = float(mpmath.hyp1f1(a, b, x))
        assert _rel(kummer_1f1(a, b, x), ref) <= 1e-11

    def test_trivial_cases(self):
        assert kummer_1f1(3.0, 2.0, 0.0) == 1.0
        assert kummer_1f1(0.0, 2.0, 5.0) == 1.0
        assert kummer_1f1(2.0, 2.0, 1.5) == pytest.approx(math.exp(1.5), rel=1e-15)

    def test_polynomial_case(self):
        # 1F1(-2; 1; x) = 1 - 2x + x^2/2
        x = 3.0
        assert kummer_1f1(-2, 1, x) == pytest.approx(1 - 2 * x + x * x / 2, rel=1e-14)

    def test_laguerre_identity(self):
        for m in (2, 15, 50):
            for x in (0.3, 5.0, 25.0):
                assert kummer_1f1(m, 1, x) == pytest.approx(math.exp(x) * laguerre(m - 1, -x), rel=1e-13)

    @pytest.mark.parametrize("a", [1.5, 3.0, 7.25])
    @pytest.mark.parametrize("b", [1.0, 2.5, 10.0])
    @pytest.mark.parametrize("x", [-4.0, -0.5, 0.7, 5.0, 20.0])
    def test_contiguous_relation(self, a, b, x):
        # (b - a) M(a-1) + (2a - b + x) M(a) - a M(a+1) = 0
        terms = [
            (b - a) * kummer_1f1(a - 1, b, x),
            (2 * a - b + x) * kummer_1f1(a, b, x),
            -a * kummer_1f1(a + 1, b, x),
        ]
        assert abs(sum(terms)) <= 1e-10 * max(abs(t) for t in terms)

    def test_nonpositive_b_raises(self):
        with pytest.raises(DomainError):
            kummer_1f1(1.0, -2.0, 1.0)


class TestGauss2F1:
    @pytest.mark.parametrize(
        "a,b,c,x",
        [
            (1, 1, 2, 0.5),
            (0.5, 1.5, 2.5, -0.7),
            (49, 60, 50, -3.5),
            (49, 99, 50, -48.0),
            (2.5, 3.0, 4.0, -120.0),
            (1.2, 0.7, 3.3, 0.9),
            (-3, 2.5, 1.5, -2.0),
        ],
    )
    def test_matches_mpmath(self, a, b, c, x):
        ref = float(mpmath.hyp2f1(a, b, c, x))
        assert _rel(gauss_2f1(a, b, c, x), ref) <= 1e-11

    def test_log_form_huge_value(self):
        # terms far beyond double range stay finite in log space
        a, b, c, x = 99, 400, 100, -0.5
        log_value, sign = log_gauss_2f1(a, b, c, x)
        ref = mpmath.hyp2f1(a, b, c, x)
        assert sign == float(mpmath.sign(ref))
        assert log_value == pytest.approx(float(mpmath.log(abs(ref))), rel=1e-12)

    def test_log_closed_form(self):
        x = 0.5
        assert gauss_2f1(1, 1, 2, x) == pytest.approx(-math.log1p(-x) / x, rel=1e-14)

    def test_argument_at_one_raises(self):
        with pytest.raises(DomainError):
            gauss_2f1(1, 1, 3, 1.0)

    def test_regularized_ordinary(self):
        a, b, c, x = 1.5, 2.0, 3.5, -1.3
        ref = float(mpmath.hyp2f1(a, b, c, x) / mpmath.gamma(c))
        assert _rel(gauss_2f1_regularized(a, b, c, x), ref) <= 1e-11

    @pytest.mark.parametrize("c", [0, -1, -2])
    def test_regularized_nonpositive_c(self, c):
        a, b, x = 1.5, 2.0, -0.4
        eps = mpmath.mpf("1e-25")
        ref = float(mpmath.hyp2f1(a, b, c + eps, x) / mpmath.gamma(c + eps))
        assert _rel(gauss_2f1_regularized(a, b, c, x), ref) <= 1e-10

    def test_regularized_at_zero_argument(self):
        assert gauss_2f1_regularized(1.0, 1.0, 3.0, 0.0) == pytest.approx(0.5, rel=1e-15)


class TestKummerNegativeArgument:
    def test_kummer_transform_with_polynomial(self):
        # e^x 1F1(-21; 1; 4) sums alternating terms of size 1e5
        ref = float(mpmath.hyp1f1(22, 1, -4.0))
        assert abs(kummer_1f1(22, 1, -4.0) - ref) <= 1e-9
