import math

import numpy as np
import pytest

from src.models.samples import SnapshotMatrix
from src.process.signal_model import Scenario, beamform, generate_batch, generate_snapshot, make_rng
from src.utils.custom_exception import DomainError


class TestScenario:
    def test_equal_snr_amplitude(self):
        sc = Scenario.equal_snr(3, 10, 0.5, sigma_sq=2.0)
        assert sc.mu_x == pytest.approx((math.sqrt(2.0),) * 3)
        assert sc.mu_y == (0.0, 0.0, 0.0)
        assert sc.snr_per_antenna == pytest.approx([0.5, 0.5, 0.5])

    def test_upsilon_is_n_times_snr_for_aligned_echoes(self):
        sc = Scenario.equal_snr(6, 10, 0.2, phase=0.7)
        assert sc.upsilon == pytest.approx(6 * 0.2)

    def test_upsilon_for_opposed_phases(self):
        sc = Scenario(2, 10, mu_x=(1.0, -1.0), mu_y=(0.0, 0.0))
        assert sc.upsilon == 0.0
        assert not sc.is_h0

    def test_h0_keeps_array(self):
        sc = Scenario.equal_snr(4, 8, 0.3, sigma_sq=1.5, seed=9)
        h0 = sc.h0()
        assert h0.is_h0
        assert (h0.n_antennas, h0.m_samples, h0.sigma_sq, h0.seed) == (4, 8, 1.5, 9)

    def test_with_seed(self):
        assert Scenario.equal_snr(1, 4, 0.0).with_seed(42).seed == 42

    def test_means_are_tuples(self):
        sc = Scenario(2, 4, mu_x=np.array([1.0, 2.0]), mu_y=[0.0, 0.5])
        assert sc.mu_x == (1.0, 2.0)
        assert hash(sc) == hash(Scenario(2, 4, mu_x=(1.0, 2.0), mu_y=(0.0, 0.5)))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_antennas=0, m_samples=4, mu_x=(), mu_y=()),
            dict(n_antennas=1, m_samples=1, mu_x=(0.0,), mu_y=(0.0,)),
            dict(n_antennas=1, m_samples=4, mu_x=(0.0,), mu_y=(0.0,), sigma_sq=0.0),
            dict(n_antennas=2, m_samples=4, mu_x=(0.0,), mu_y=(0.0, 0.0)),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            Scenario(**kwargs)

    def test_negative_snr(self):
        with pytest.raises(DomainError):
            Scenario.equal_snr(2, 4, -0.1)


class TestGeneration:
    def test_batch_shape(self):
        x, y = generate_batch(Scenario.equal_snr(3, 7, 0.1), make_rng(1), 5)
        assert x.shape == y.shape == (5, 3, 7)

    def test_same_seed_same_snapshot(self):
        sc = Scenario.equal_snr(3, 7, 0.1, seed=123)
        a, b = generate_snapshot(sc), generate_snapshot(sc)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.y, b.y)

    def test_moments(self):
        sc = Scenario(2, 4, mu_x=(1.0, -0.5), mu_y=(0.25, 0.0), sigma_sq=2.0)
        x, y = generate_batch(sc, make_rng(5), 50_000)
        np.testing.assert_allclose(x.mean(axis=(0, 2)), [1.0, -0.5], atol=0.02)
        np.testing.assert_allclose(y.mean(axis=(0, 2)), [0.25, 0.0], atol=0.02)
        assert x.var() == pytest.approx(2.0 + np.var([1.0, -0.5]), rel=0.02)

    def test_beamform_sums_antennas(self):
        s = SnapshotMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[0.5, 0.0], [0.0, -1.0]]))
        np.testing.assert_allclose(beamform(s).r, [4 + 0.5j, 6 - 1j])
