import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdbusy import RangeError, make_params
from mdbusy import bounds as Bd
from mdbusy import moments, series


class TestEnvelope:
    def test_examples(self):
        assert Bd.envelope(make_params(1, 3), 4)[0] == pytest.approx(0.0497871, abs=5e-8)
        assert Bd.envelope(make_params(1, 1), 0.5) == (0.0, 0.0)
        lower, upper = Bd.envelope(make_params(1, 0.1), 0.1)
        assert lower == pytest.approx(0.904837, abs=5e-7)
        assert upper == 1.0

    @pytest.mark.parametrize("rho", [0.1, 0.5, 1.0, 3.0])
    def test_sandwich(self, rho):
        params = make_params(1.0, rho)
        for t in rho * np.linspace(0.0, 15.0, 61):
            lower, upper = Bd.envelope(params, t)
            value = series.busy_cdf(params, t).value
            assert lower <= value <= upper


class TestChebyshev:
    @pytest.mark.parametrize(
        "alpha, t, value, valid",
        [(3.0, 4.0, -0.238790, False), (3.0, 40.0, 0.355496, True), (0.1, 0.11, -14.805062, False)],
    )
    def test_examples(self, alpha, t, value, valid):
        b = Bd.chebyshev_lower(make_params(1.0, alpha), t)
        assert b.value == pytest.approx(value, abs=5e-7)
        assert b.valid is valid
        assert b.kind is Bd.BoundKind.CHEBYSHEV_LOWER

    def test_formula(self):
        params = make_params(2.0, 0.6)
        rho, lam, t = 1.2, 2.0, 5.0
        e = math.exp(rho)
        want = 1 - (e * e - 2 * rho * e - 1) / (1 + lam * t - e) ** 2
        assert Bd.chebyshev_lower(params, t).value == pytest.approx(want, rel=1e-13)

    def test_mean_is_degenerate(self, unit_params):
        b = Bd.chebyshev_lower(unit_params, moments.mean(unit_params))
        assert not b.valid

    @pytest.mark.parametrize("rho", [0.5, 1.0, 3.0])
    def test_dominated_by_series(self, rho):
        params = make_params(1.0, rho)
        checked = 0
        for t in rho * np.linspace(1.0, 40.0, 157):
            b = Bd.chebyshev_lower(params, t)
            if b.valid:
                checked += 1
                assert b.value <= series.busy_cdf(params, t).value
        assert checked > 20

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=0.05, max_value=6.0), st.floats(min_value=1e-3, max_value=50.0), st.floats(min_value=1e-3, max_value=5.0))
    def test_increasing_beyond_mean(self, rho, x, dx):
        params = make_params(1.0, rho)
        t = moments.mean(params) + x
        assert Bd.chebyshev_lower(params, t + dx).value > Bd.chebyshev_lower(params, t).value

    def test_overflow(self):
        with pytest.raises(RangeError):
            Bd.chebyshev_lower(make_params(1.0, 400.0), 1e3)


class TestExpApprox:
    def test_examples(self):
        params = make_params(1.0, 1.0)
        assert Bd.exp_approx(params, 0.0) == 0.0
        assert Bd.exp_approx(params, math.e) == pytest.approx(1 - math.exp(-1), rel=1e-14)
        assert Bd.exp_approx(params, math.e) == pytest.approx(0.632, abs=1e-3)

    def test_kolmogorov_distance(self):
        assert Bd.kolmogorov_distance(lambda t: t, lambda t: t * t, [0.0, 0.5, 1.0]) == 0.25

    @pytest.mark.parametrize("rho", [2.0, 5.0])
    def test_delay_expansion_is_a_fair_oracle(self, rho):
        params = make_params(1.0, rho)
        for t in np.linspace(rho, 20 * math.exp(rho), 15):
            assert series.busy_cdf_delay(params, t) == pytest.approx(series.busy_cdf(params, t).value, abs=2e-6)

    @staticmethod
    def distance(rho, points):
        params = make_params(1.0, rho)
        ts = np.linspace(rho, 20 * math.exp(rho), points)
        return Bd.kolmogorov_distance(
            lambda t: Bd.exp_approx(params, t), lambda t: series.busy_cdf_delay(params, t), ts
        )

    def test_mid_rho_pin(self):
        assert self.distance(5.0, 2000) <= 0.05

    def test_trend(self):
        d2, d5, d10 = self.distance(2.0, 800), self.distance(5.0, 800), self.distance(10.0, 400)
        assert d10 < d5 < d2
