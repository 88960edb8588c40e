import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from zetapair.zeta_zeros import (
    CountMismatchWarning,
    Zero,
    ZeroDataset,
    compute_zeros,
    density_check,
    hardy_Z,
    n_of_T,
    rs_theta,
)


class TestZeroTypes:
    def test_zero_validation(self):
        with pytest.raises(ValueError):
            Zero(-1.0)
        with pytest.raises(ValueError):
            Zero(10.0, beta=1.0)
        with pytest.raises(ValueError):
            Zero(10.0, multiplicity=0)

    def test_rho(self):
        assert Zero(14.0, 0.4).rho == complex(0.4, 14.0)

    def test_dataset_requires_order(self):
        with pytest.raises(ValueError):
            ZeroDataset.on_line_ordinates([20.0, 20.0])
        with pytest.raises(ValueError):
            ZeroDataset(np.array([30.0, 20.0]), None, None, 10, 40)

    def test_on_line_flag_enforced(self):
        with pytest.raises(ValueError):
            ZeroDataset(np.array([20.0]), np.array([0.4]), None, 10, 40, source="computed", on_line=True)

    def test_synthetic_needs_partners(self):
        with pytest.raises(ValueError):
            ZeroDataset.from_zeros([Zero(20.0, 0.4)])
        ds = ZeroDataset.from_zeros([Zero(20.0, 0.4), Zero(20.0, 0.6), Zero(25.0)])
        assert ds.is_symmetric() and not ds.on_line

    def test_partner_tolerates_rounding(self):
        ds = ZeroDataset.from_zeros([Zero(30.0, 0.45), Zero(30.0, 1 - 0.45)])
        assert list(ds.partner_indices()) == [1, 0]

    def test_window_half_open(self):
        ds = ZeroDataset.on_line_ordinates([10.0, 20.0, 30.0])
        assert list(ds.window(10.0, 20.0).gammas) == [20.0]

    def test_arrays_read_only(self):
        ds = ZeroDataset.on_line_ordinates([11.0, 12.0])
        with pytest.raises(ValueError):
            ds.gammas[0] = 3.0


class TestTheta:
    def test_against_loggamma(self):
        for t in (10.0, 14.1, 100.0, 1234.5, 9999.0):
            assert abs(rs_theta(t) - float(oracles.theta(t))) < 1e-10

    def test_t100(self):
        assert abs(rs_theta(100.0) - float(oracles.theta(100.0))) < 1e-9

    def test_monotone(self):
        t = np.linspace(10, 1e4, 20001)
        assert np.all(np.diff(rs_theta(t)) > 0)

    def test_derivative(self):
        t, h = 2 * math.pi * math.e, 1e-5
        fd = (rs_theta(t + h) - rs_theta(t - h)) / (2 * h)
        # theta'(t) = (1/2) log(t / 2 pi) + O(1/t^2) = 1/2 + O(1/t^2)
        assert abs(fd - float(mp.diff(oracles.theta, t))) < 1e-6

    def test_domain(self):
        with pytest.raises(ValueError):
            rs_theta(5.0)


class TestHardyZ:
    def test_sign_change_near_first_zero(self):
        assert hardy_Z(14.0) * hardy_Z(15.0) < 0
        assert float(oracles.hardy_z(14)) * float(oracles.hardy_z(15)) < 0

    @pytest.mark.parametrize("t", [20.0, 50.0, 100.0])
    def test_modulus_matches_zeta(self, t):
        zeta = oracles.zeta_em(mp.mpf(0.5) + 1j * t)
        assert abs(abs(hardy_Z(t)) - float(abs(zeta))) < 1e-6

    @pytest.mark.parametrize("t", [11.0, 123.456, 399.9, 400.1, 777.7, 2500.3])
    def test_value_matches_oracle(self, t):
        assert abs(hardy_Z(t) - float(oracles.hardy_z(t))) < 1e-8

    def test_continuity(self):
        for t in (17.3, 250.0, 400.0, 3000.7):
            assert abs(hardy_Z(t + 1e-9) - hardy_Z(t)) < 1e-6

    def test_vectorized(self):
        ts = np.array([20.0, 500.0])
        np.testing.assert_allclose(hardy_Z(ts), [hardy_Z(20.0), hardy_Z(500.0)], rtol=0, atol=0)

    def test_domain(self):
        with pytest.raises(ValueError):
            hardy_Z(9.0)


class TestComputeZeros:
    def test_below_100(self):
        ds = compute_zeros(10.0, 100.0)
        assert len(ds) == 29
        assert abs(ds.gammas[0] - 14.134725) < 1e-5
        oracle = oracles.zeros_in(10.0, 100.0, step=0.1)
        assert len(oracle) == 29
        assert np.max(np.abs(ds.gammas - np.array(oracle))) < 1e-8

    def test_below_50(self):
        assert len(compute_zeros(10.0, 50.0)) == 10

    def test_degenerate(self):
        assert len(compute_zeros(50.0, 50.0)) == 0

    def test_domain(self):
        with pytest.raises(ValueError):
            compute_zeros(5.0, 100.0)
        with pytest.raises(ValueError):
            compute_zeros(100.0, 50.0)

    def test_properties(self, zeros_to_1000):
        ds = zeros_to_1000
        assert ds.source == "computed" and ds.on_line and ds.count_warning is None
        assert np.all(np.diff(ds.gammas) > 0)
        assert np.all(ds.multiplicities == 1)
        assert np.max(np.abs(hardy_Z(ds.gammas))) < 1e-6

    def test_spot_check_high_zero(self):
        ds = compute_zeros(5000.0, 5010.0)
        assert abs(ds.gammas[0] - float(mp.zetazero(4521).imag)) < 1e-8

    def test_count_against_main_term(self):
        ds = compute_zeros(10.0, 1e4)
        for T in (100.0, 500.0, 1000.0, 5000.0, 1e4):
            n = int(np.sum(ds.gammas <= T))
            assert abs(n - (n_of_T(T) - n_of_T(10.0))) <= 2 + math.log(T), T

    def test_mismatch_is_reported(self, monkeypatch):
        import zetapair.zeta_zeros as zz

        real = zz._scan

        def lossy(*args, **kwargs):
            brackets, exact = real(*args, **kwargs)
            return brackets[::2], exact

        monkeypatch.setattr(zz, "_scan", lossy)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            ds = compute_zeros(10.0, 300.0, max_retries=1)
        assert ds.count_warning is not None
        assert any(issubclass(w.category, CountMismatchWarning) for w in caught)


class TestCounting:
    def test_n_of_100(self):
        assert n_of_T(100.0) == pytest.approx(29.0, abs=0.01)

    def test_at_two_pi(self):
        assert n_of_T(2 * math.pi) == pytest.approx(-0.125, abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            n_of_T(1.0)

    def test_density_basic(self):
        empty = ZeroDataset.on_line_ordinates([])
        assert density_check(empty, 50.0) == 0.0
        assert density_check(ZeroDataset.on_line_ordinates([50.0]), 50.0) == 1.0

    def test_density_at_500(self, zeros_to_1000):
        assert density_check(zeros_to_1000, 500.0) <= 3 * math.log(502)

    def test_density_bounded_by_log(self):
        ds = compute_zeros(10.0, 1e4)
        rng = np.random.default_rng(1)
        ratios = [density_check(ds, t) / math.log(t + 2) for t in rng.uniform(20, 1e4, 100)]
        assert max(ratios) < 3


@given(st.floats(10, 1e5))
def test_theta_increasing_pointwise(t):
    assert rs_theta(t + 0.01) > rs_theta(t)
