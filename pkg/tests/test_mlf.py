import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mp_oracle
from fraccob.errors import DomainError, NonConvergence
from fraccob.mlf import (
    DEFAULT_CONFIG,
    MLArgument,
    MLConfig,
    asymptotic_error_estimate,
    asymptotic_switch,
    mittag_leffler,
    ml_asymptotic,
    ml_eval,
    ml_regime,
    ml_series,
    recip_gamma,
    series_error_estimate,
)

TOL = DEFAULT_CONFIG.series_tol

# frozen from mpmath: 60-digit series, and de Hoog / Talbot inversion where the
# series is out of reach (both inversions agree to 20 digits)
E_HALF_MINUS_2 = 0.25539567631050574387
E_09_09_MINUS_1E6 = 9.4602644218967270315e-14
E_01_TABLE1 = 0.23787507112386932971
E_05_1_MINUS_19 = 0.029653230641262163525
E_05_05_MINUS_19 = 0.00077820136377517996935


def test_recip_gamma_values():
    assert recip_gamma(1.0) == 1.0
    assert recip_gamma(0.5) == pytest.approx(0.56418958354775628695, rel=1e-15)
    assert recip_gamma(5.0) == pytest.approx(1 / 24, rel=1e-15)


@pytest.mark.parametrize("n", [0, -1, -2, -3])
def test_recip_gamma_poles_are_exact_zeros(n):
    assert recip_gamma(float(n)) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20).filter(lambda x: abs(x - round(x)) > 1e-6))
def test_recip_gamma_matches_mpmath(x):
    ref = mp_oracle.rgamma(x)
    assert recip_gamma(x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_argument_validation():
    with pytest.raises(DomainError):
        MLArgument(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        MLArgument(2.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        MLArgument(0.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        MLArgument(0.5, 1.0, math.inf)


@pytest.mark.parametrize(
    "kwargs",
    [{"series_tol": 0.0}, {"max_terms": 0}, {"asym_switch": -1.0}, {"asym_terms": 0}],
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        MLConfig(**kwargs)


class TestSeries:
    def test_exponential(self):
        assert ml_series(MLArgument(1.0, 1.0, 1.0)) == pytest.approx(math.e, rel=1e-14)

    def test_only_first_term_at_zero(self):
        assert ml_series(MLArgument(0.7, 0.9, 0.0)) == recip_gamma(0.9)

    def test_half_order_at_minus_two(self):
        assert ml_series(MLArgument(0.5, 1.0, -2.0)) == pytest.approx(E_HALF_MINUS_2, abs=TOL)

    def test_term_cap_raises(self):
        with pytest.raises(NonConvergence):
            ml_series(MLArgument(0.5, 1.0, -10.0), MLConfig(max_terms=5))


class TestAsymptotic:
    def test_one_term(self):
        value = ml_asymptotic(MLArgument(0.5, 1.0, -19.0), MLConfig(asym_terms=1))
        assert value == pytest.approx(1 / 19 * recip_gamma(0.5), rel=1e-15)
        assert value == pytest.approx(0.02970, abs=1e-5)
        # the omitted terms are O(|z|^-2)
        assert abs(value - E_05_1_MINUS_19) < 19.0**-2

    def test_first_term_vanishes_at_gamma_pole(self):
        assert ml_asymptotic(MLArgument(0.5, 0.5, -19.0), MLConfig(asym_terms=1)) == 0.0

    def test_two_terms_far_out(self):
        value = ml_asymptotic(MLArgument(0.9, 0.9, -1e6), MLConfig(asym_terms=2))
        assert abs(value - E_09_09_MINUS_1E6) < 1e6**-3

    def test_rejects_positive(self):
        with pytest.raises(DomainError):
            ml_asymptotic(MLArgument(0.5, 1.0, 20.0))


class TestEval:
    def test_exponential(self):
        assert ml_eval(MLArgument(1.0, 1.0, -3.0)) == pytest.approx(math.exp(-3.0), rel=1e-13)

    def test_zero(self):
        assert ml_eval(MLArgument(0.5, 1.0, 0.0)) == 1.0

    def test_small_order_table_argument(self):
        z = -1.9 * 100**0.1
        assert ml_eval(MLArgument(0.1, 1.0, z)) == pytest.approx(E_01_TABLE1, rel=1e-12)

    @pytest.mark.parametrize(
        "gamma,ref", [(1.0, E_05_1_MINUS_19), (0.5, E_05_05_MINUS_19)]
    )
    def test_beyond_switch(self, gamma, ref):
        assert ml_eval(MLArgument(0.5, gamma, -19.0)) == pytest.approx(ref, abs=1e-13)

    def test_far_negative(self):
        value = ml_eval(MLArgument(0.9, 0.9, -1e6))
        assert value == pytest.approx(E_09_09_MINUS_1E6, rel=1e-12)

    def test_vectorized_matches_scalar(self):
        # batching changes only the rounding inside the quadrature products
        z = np.linspace(-40, 3, 57)
        vec = mittag_leffler(0.6, 0.8, z)
        for zi, vi in zip(z, vec):
            assert ml_eval(MLArgument(0.6, 0.8, float(zi))) == pytest.approx(vi, rel=1e-13)

    def test_overflow_is_inf(self):
        assert mittag_leffler(0.1, 1.0, 2.0) == np.inf

    def test_regime_names(self):
        assert ml_regime(MLArgument(0.5, 1.0, 3.0)) == "series"
        assert ml_regime(MLArgument(0.9, 1.0, -1e6)) == "asymptotic"
        assert ml_regime(MLArgument(0.1, 1.0, -3.0)) == "spectral"
        assert ml_regime(MLArgument(1.0, 0.5, -40.0)) == "kummer"


@settings(max_examples=80, deadline=None)
@given(st.floats(-20, 5))
def test_order_one_is_exponential(z):
    assert abs(ml_eval(MLArgument(1.0, 1.0, z)) - math.exp(z)) < 10 * TOL * max(1, math.exp(z))


@settings(max_examples=80, deadline=None)
@given(st.floats(-10, 5).filter(lambda z: abs(z) > 1e-8))
def test_second_parameter_two(z):
    expected = math.expm1(z) / z
    assert abs(ml_eval(MLArgument(1.0, 2.0, z)) - expected) < 10 * TOL * max(1, expected)


@settings(max_examples=150, deadline=None)
@given(
    st.floats(0.05, 1.0),
    st.floats(0.05, 2.0),
    st.floats(-30.0, 2.0),
)
def test_index_shift_recurrence(mu, gamma, z):
    lhs = ml_eval(MLArgument(mu, gamma, z))
    if not math.isfinite(lhs):
        return
    rhs = z * ml_eval(MLArgument(mu, gamma + mu, z)) + recip_gamma(gamma)
    assert abs(lhs - rhs) < 100 * TOL * max(1.0, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 1.9), st.floats(0.1, 2.0), st.floats(-15.0, 15.0))
def test_against_extended_precision_series(mu, gamma, z):
    ref = mp_oracle.ml_series(mu, gamma, z)
    assert abs(ml_eval(MLArgument(mu, gamma, z)) - ref) < 1e-10 * max(1.0, abs(ref))


@pytest.mark.parametrize("mu", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("same", [True, False])
def test_decay_far_out(mu, same):
    gamma = mu if same else 1.0
    z = -np.geomspace(asymptotic_switch(mu) * 2, 1e6, 40)
    values = np.abs(mittag_leffler(mu, gamma, z))
    assert np.all(np.diff(values) <= 0)
    assert values[-1] < 1e-2


@pytest.mark.parametrize("mu", [0.85, 0.9, 0.95, 0.99, 1.3])
@pytest.mark.parametrize("gamma", [0.3, 0.9, 1.0, 1.5])
def test_regimes_agree_at_switch(mu, gamma):
    z = -DEFAULT_CONFIG.asym_switch
    arg = MLArgument(mu, gamma, z)
    gap = abs(ml_series(arg) - ml_asymptotic(arg))
    h = DEFAULT_CONFIG.asym_terms
    bound = series_error_estimate(mu, gamma, z) + asymptotic_error_estimate(mu, gamma, z, h)
    assert gap <= max(100 * TOL, float(bound))


def test_small_order_lowers_switch():
    assert asymptotic_switch(0.1) == 5.0
    assert asymptotic_switch(0.5) == DEFAULT_CONFIG.asym_switch


def test_spectral_against_laplace_inversion():
    for mu, gamma, x in [(0.15, 0.4, 18.4), (0.3, 1.0, 40.0), (0.7, 0.7, 100.0)]:
        ref = mp_oracle.ml_laplace(mu, gamma, x)
        assert ml_eval(MLArgument(mu, gamma, -x)) == pytest.approx(ref, abs=TOL)
