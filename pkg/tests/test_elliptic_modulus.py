import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from geocurrents.elliptic_modulus import (
    ModulusParams,
    agm,
    carlson_rf,
    elliptic_K,
    elliptic_K_carlson,
    eta,
    eta_inverse,
    modulus_report,
    omega,
)
from geocurrents.errors import DomainError


def k_quad(k):
    v, _ = integrate.quad(lambda th: 1 / math.sqrt(1 - (k * math.sin(th)) ** 2), 0, math.pi / 2,
                          epsabs=0, epsrel=1e-13)
    return v


class TestK:
    def test_zero(self):
        assert elliptic_K(0.0) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_square_modulus(self):
        k = 1 / math.sqrt(2)
        assert elliptic_K(k) == pytest.approx(k_quad(k), rel=1e-12)
        assert elliptic_K(k) == pytest.approx(1.854075, abs=1e-6)

    @pytest.mark.parametrize("k", np.linspace(0.0, 0.99, 12))
    def test_three_way(self, k):
        a, c, q = elliptic_K(k), elliptic_K_carlson(k), k_quad(k)
        assert a == pytest.approx(q, rel=1e-12)
        assert c == pytest.approx(q, rel=1e-12)
        assert a == pytest.approx(special.ellipk(k * k), rel=1e-12)

    def test_increasing(self):
        ks = np.linspace(0, 0.999, 200)
        assert np.all(np.diff([elliptic_K(k) for k in ks]) > 0)

    def test_logarithmic_end(self):
        # K(k) - log(4/k') = O(k'^2 log k')
        for kp in (1e-3, 1e-5, 1e-8):
            ratio = math.pi / (2 * agm(1.0, kp)) / math.log(4 / kp)
            assert abs(ratio - 1) < 10 * kp * kp * math.log(1 / kp) / math.log(4 / kp)

    @pytest.mark.parametrize("k", [1.0, 1.5, -0.1, math.nan])
    def test_domain(self, k):
        with pytest.raises(DomainError):
            elliptic_K(k)


class TestCarlson:
    def test_equal_arguments(self):
        for c in (0.25, 1.0, 7.0):
            assert carlson_rf(c, c, c) == pytest.approx(c ** -0.5, rel=1e-14)

    def test_matches_K(self):
        assert carlson_rf(0.0, 1 - 0.09, 1.0) == pytest.approx(elliptic_K(0.3), abs=1e-11)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0, 10))
    def test_symmetric(self, x, y, z):
        ref = carlson_rf(x, y, z)
        for p in ((y, z, x), (z, x, y), (x, z, y)):
            assert carlson_rf(*p) == pytest.approx(ref, rel=1e-13)

    @given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.1, 10))
    def test_homogeneous(self, x, y, z, s):
        assert carlson_rf(s * x, s * y, s * z) == pytest.approx(carlson_rf(x, y, z) / math.sqrt(s), rel=1e-12)

    def test_two_zeros(self):
        with pytest.raises(DomainError):
            carlson_rf(0.0, 0.0, 1.0)

    def test_negative(self):
        with pytest.raises(DomainError):
            carlson_rf(-1.0, 1.0, 1.0)


class TestParams:
    @given(st.floats(1e-6, 30))
    def test_complementary(self, t):
        p = ModulusParams(t)
        assert p.k ** 2 + p.k_prime ** 2 == pytest.approx(1.0, abs=1e-12)

    # going through k loses about e^t * eps, since k -> 1
    @given(st.floats(1e-3, 10))
    def test_round_trip(self, t):
        assert ModulusParams.from_k(ModulusParams(t).k).t == pytest.approx(t, rel=1e-9)

    def test_bad_values(self):
        with pytest.raises(DomainError):
            ModulusParams(0.0)
        with pytest.raises(DomainError):
            ModulusParams(1.0, 0.5)


class TestEta:
    def test_symmetric_box(self):
        assert eta(math.log(2)) == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0.01, 20))
    def test_complementary_box(self, t):
        t2 = -math.log1p(-math.exp(-t))
        assert eta(t) * eta(t2) == pytest.approx(1.0, abs=1e-9)

    def test_increasing(self):
        v = [eta(t) for t in np.geomspace(1e-8, 1e3, 1000)]
        assert np.all(np.diff(v) > 0)

    def test_small_regime_stable(self):
        r = [eta(t) * math.log(16 / t) for t in np.geomspace(1e-6, 1e-2, 50)]
        assert max(r) / min(r) < 4

    def test_small_regime_limit_is_pi(self):
        # K(k) -> pi/2 and K(k') ~ log(16/t) / 2
        for t in (1e-2, 1e-4, 1e-6):
            assert eta(t) * math.log(16 / t) == pytest.approx(math.pi, abs=t)

    @pytest.mark.xfail(strict=True, reason="eta(t) log(16/t) tends to pi, just above 3")
    def test_small_regime_band_up_to_three(self):
        r = [eta(t) * math.log(16 / t) for t in np.geomspace(1e-6, 1e-2, 50)]
        assert 0.3 <= min(r) and max(r) <= 3

    def test_large_regime(self):
        r = [eta(t) / t for t in np.linspace(20, 200, 50)]
        assert 0.3 <= min(r) and max(r) <= 3 and max(r) / min(r) < 4

    def test_no_overflow_past_switch(self):
        # the closed form beyond t = 1400 joins the AGM value
        lo, hi = eta(1399.9), eta(1400.1)
        assert 0 < hi - lo < 0.2 / math.pi * 1.01
        assert math.isfinite(eta(1e5))

    def test_domain(self):
        with pytest.raises(DomainError):
            eta(0.0)


class TestInverse:
    def test_unit(self):
        assert eta_inverse(1.0) == pytest.approx(math.log(2), abs=1e-11)

    @given(st.floats(0.01, 50))
    def test_round_trip(self, t):
        assert abs(eta_inverse(eta(t)) - t) <= 10 * 1e-12 * max(1.0, t)

    def test_zero(self):
        with pytest.raises(DomainError):
            eta_inverse(0.0)


def small_t_asymptote(t, M):
    # K(k) -> pi/2 and K(k') ~ log(4/sqrt t) give eta(t) ~ (pi/2) / log(4/sqrt t)
    return 16 * (t / 16) ** (1 / M)


class TestOmega:
    @pytest.mark.parametrize("t", [1e-3, 0.7, 12.0])
    def test_identity(self, t):
        assert omega(t, 1.0) == t

    def test_increasing(self):
        v = [omega(t, 2.0) for t in np.geomspace(1e-6, 100, 1000)]
        assert np.all(np.diff(v) > 0)

    @pytest.mark.parametrize("M", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("t", [1e-2, 1e-4, 1e-6])
    def test_small_t_closed_form(self, t, M):
        # the correction is first order in the image point omega, not in t
        a = small_t_asymptote(t, M)
        assert omega(t, M) / a == pytest.approx(1.0, abs=0.1 * a)

    def test_small_t_power_stable(self):
        r = [omega(t, 2.0) / math.sqrt(t) for t in np.geomspace(1e-6, 1e-2, 20)]
        assert max(r) / min(r) < 4

    @pytest.mark.xfail(strict=True, reason="log omega / log t drifts 14.6% between 1e-4 and 1e-6; "
                                           "the 16^(1-1/M) prefactor decays only like 1/log t")
    def test_log_ratio_drift_below_ten_percent(self):
        r4 = math.log(omega(1e-4, 2.0)) / math.log(1e-4)
        r6 = math.log(omega(1e-6, 2.0)) / math.log(1e-6)
        assert abs(r6 - r4) / r6 < 0.10

    def test_large_regime(self):
        r = [omega(t, 2.0) / t for t in np.linspace(20, 200, 30)]
        assert 0.3 <= min(r) and max(r) <= 3

    def test_report(self):
        rep = modulus_report(0.5, 2.0)
        assert set(rep) == {"t", "M", "k", "k_prime", "eta", "omega"}
        assert rep["omega"] > rep["t"]
