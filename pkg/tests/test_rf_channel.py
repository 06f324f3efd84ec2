import math
import sys
from pathlib import Path

import mpmath
import numpy as np
import pytest
from scipy import integrate, stats

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from rffso.errors import DomainError, TruncationError  # noqa: E402
from rffso.montecarlo import block_rng, ks_against  # noqa: E402
from rffso.rf_channel import (  # noqa: E402
    RfParams,
    rf_ccdf,
    rf_cdf,
    rf_cdf_series,
    rf_derive,
    rf_pdf,
    rf_pdf_series,
    rf_sample,
)

FIG2 = RfParams(alpha=2.5, kappa=1.0, mu=1, x_shadow=100.0, phi_r=10.0)
FIG3 = RfParams(alpha=2.0, kappa=2.0, mu=2, x_shadow=10.0, phi_r=3.0)
FIG8 = RfParams(alpha=3.0, kappa=2.0, mu=2, x_shadow=1000.0, phi_r=10 ** 1.2)
HEAVY = RfParams(alpha=1.5, kappa=1.5, mu=2, x_shadow=1.0, phi_r=2.0)
CASES = [FIG2, FIG3, FIG8, HEAVY]


def integrate_log(f, lo=1e-12, hi=1e6):
    value, _ = integrate.quad(lambda u: f(math.exp(u)) * math.exp(u), math.log(lo), math.log(hi),
                              limit=400, epsabs=1e-13, epsrel=1e-11)
    return value


class TestParams:
    def test_mu_must_be_integral(self):
        with pytest.raises(DomainError):
            RfParams(alpha=2.0, kappa=1.0, mu=1.5, x_shadow=1.0, phi_r=1.0)

    def test_integral_float_mu_is_accepted(self):
        params = RfParams(alpha=2.0, kappa=1.0, mu=2.0, x_shadow=1.0, phi_r=1.0)
        assert params.mu == 2 and isinstance(params.mu, int)

    @pytest.mark.parametrize(
        "field,value",
        [("alpha", 0.0), ("kappa", -0.1), ("mu", 0), ("x_shadow", 0.0), ("phi_r", 0.0), ("phi_r", math.inf)],
    )
    def test_ranges(self, field, value):
        kwargs = dict(alpha=2.0, kappa=1.0, mu=1, x_shadow=1.0, phi_r=1.0)
        kwargs[field] = value
        with pytest.raises(DomainError):
            RfParams(**kwargs)

    def test_eta_mu_mapping(self):
        params = RfParams.eta_mu(eta=0.5, mu=1.0, phi_r=1.0)
        assert (params.alpha, params.kappa, params.mu, params.x_shadow) == (2.0, 0.5, 2, 1.0)

    def test_special_cases(self):
        assert RfParams.nakagami(3, 1.0).mu == 3
        assert RfParams.weibull(3.0, 1.0).kappa == 0.0
        assert RfParams.kappa_mu(1.0, 2, 1.0).x_shadow == 1e4
        assert RfParams.alpha_kappa_mu(3.0, 1.0, 2, 1.0).alpha == 3.0

    def test_with_phi(self):
        assert FIG2.with_phi(5.0).phi_r == 5.0
        assert FIG2.with_phi(5.0).alpha == FIG2.alpha


class TestReductions:
    @pytest.mark.parametrize("gamma", [1e-4, 0.3, 2.0, 15.0, 80.0])
    def test_rayleigh_is_exponential(self, gamma):
        params = RfParams.rayleigh(phi_r=4.0)
        assert rf_pdf(params, gamma) == pytest.approx(math.exp(-gamma / 4.0) / 4.0, rel=1e-10)
        assert rf_cdf(params, gamma) == pytest.approx(-math.expm1(-gamma / 4.0), rel=1e-10)

    @pytest.mark.parametrize("m", [2, 3, 5])
    @pytest.mark.parametrize("gamma", [0.01, 1.0, 7.0])
    def test_nakagami_is_gamma(self, m, gamma):
        params = RfParams.nakagami(m, phi_r=2.0)
        expected = stats.gamma.pdf(gamma, a=m, scale=2.0 / m)
        assert rf_pdf(params, gamma) == pytest.approx(expected, rel=1e-10)

    def test_weibull(self):
        params = RfParams.weibull(alpha=3.0, phi_r=2.0)
        # gamma^(alpha/2) is exponential with mean phi^(alpha/2) / Gamma(1 + 2/alpha)^(alpha/2)
        scale = (2.0 / math.gamma(1.0 + 2.0 / 3.0)) ** 1.5
        gamma = 1.7
        assert rf_cdf(params, gamma) == pytest.approx(-math.expm1(-(gamma ** 1.5) / scale), rel=1e-10)

    def test_rayleigh_constants(self):
        der = rf_derive(RfParams.rayleigh(phi_r=4.0))
        assert der.d_const == pytest.approx(1.0, rel=1e-14)
        assert der.a2 == pytest.approx(0.25, rel=1e-14)
        assert der.a3 == 0.0
        assert der.k_ratio == 0.0


@pytest.mark.parametrize("params", CASES)
def test_pdf_integrates_to_one(params):
    assert integrate_log(lambda g: rf_pdf(params, g)) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("params", CASES)
def test_mean_is_average_snr(params):
    assert integrate_log(lambda g: g * rf_pdf(params, g), hi=1e8) == pytest.approx(params.phi_r, rel=1e-6)


@pytest.mark.parametrize("params", CASES)
@pytest.mark.parametrize("gamma", [1e5, 1e6])
def test_pdf_far_tail(params, gamma):
    der = rf_derive(params)
    t = math.exp(der.log_a2 + 0.5 * params.alpha * math.log(gamma))
    with mpmath.workdps(30):
        log_expected = (der.log_a1 + (0.5 * params.alpha * params.mu - 1.0) * mpmath.log(gamma) - t
                        + mpmath.log(mpmath.hyp1f1(params.x_shadow, params.mu, der.k_ratio * t)))
        expected = float(mpmath.exp(log_expected))
    density = rf_pdf(params, gamma)
    assert math.isfinite(density) and density >= 0.0
    assert density == pytest.approx(expected, rel=1e-8, abs=1e-300)


@pytest.mark.parametrize("params", CASES)
@pytest.mark.parametrize("gamma", [0.05, 1.0, 9.0, 60.0])
def test_series_density_matches_closed_form(params, gamma):
    assert rf_pdf_series(params, gamma) == pytest.approx(rf_pdf(params, gamma), rel=1e-9)


@pytest.mark.parametrize("params", CASES)
@pytest.mark.parametrize("gamma", [0.1, 1.0, 12.0])
def test_cdf_matches_integrated_density(params, gamma):
    expected = integrate_log(lambda g: rf_pdf(params, g), lo=1e-14, hi=gamma)
    assert rf_cdf(params, gamma) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("params", CASES)
def test_cdf_derivative_is_density(params):
    for gamma in np.geomspace(0.05, 40.0, 20):
        h = gamma * 1e-5
        slope = (rf_cdf(params, gamma + h) - rf_cdf(params, gamma - h)) / (2.0 * h)
        assert slope == pytest.approx(rf_pdf(params, gamma), rel=1e-5)


def test_cdf_and_survival_complement():
    grid = np.geomspace(1e-6, 1e3, 50)
    series = rf_cdf_series(HEAVY, grid)
    assert np.allclose(series.cdf + series.survival, 1.0, atol=1e-11)
    assert series.tail_bound <= 1e-12 * 1.0 + 1e-15
    assert series.n_terms > 1


def test_cdf_at_zero_and_tail():
    assert rf_cdf(FIG2, 0.0) == 0.0
    assert rf_ccdf(FIG2, 0.0) == pytest.approx(1.0, abs=1e-11)
    assert rf_cdf(FIG2, 1e5) == pytest.approx(1.0, abs=1e-12)
    assert rf_ccdf(FIG8, 1e4) < 1e-12


def test_cdf_rejects_negative():
    with pytest.raises(DomainError):
        rf_cdf(FIG2, -1.0)


def test_truncation_error_when_cap_too_small():
    with pytest.raises(TruncationError) as info:
        rf_cdf(HEAVY, 1.0, i_max=3)
    assert info.value.iterations == 4


def test_double_sum_coefficients_rebuild_survival():
    der = rf_derive(FIG3)
    gamma = 1.0
    t = der.a2 * gamma ** (FIG3.alpha / 2.0)
    total = 0.0
    for i in range(rf_cdf_series(FIG3, gamma).n_terms):
        for j in range(FIG3.mu + i):
            total += 2.0 * der.a1 * der.a5_of(i, j) * gamma ** (FIG3.alpha * j / 2.0) * math.exp(-t) / FIG3.alpha
    assert total == pytest.approx(rf_ccdf(FIG3, gamma), rel=1e-10)


def test_a5_index_range():
    der = rf_derive(FIG3)
    with pytest.raises(DomainError):
        der.a5_of(0, FIG3.mu)


class TestSampler:
    def test_deterministic(self):
        first = rf_sample(FIG2, block_rng(7, 0), 1000)
        second = rf_sample(FIG2, block_rng(7, 0), 1000)
        assert np.array_equal(first, second)

    def test_mean(self):
        samples = rf_sample(FIG3, block_rng(11, 0), 200_000)
        se = samples.std() / math.sqrt(samples.size)
        assert abs(samples.mean() - FIG3.phi_r) < 4.0 * se

    @pytest.mark.parametrize("params", CASES)
    def test_ks_against_closed_form(self, params):
        samples = rf_sample(params, block_rng(3, 1), 20_000)
        result = stats.kstest(samples, lambda g: rf_cdf(params, g))
        assert result.pvalue > 0.01

    def test_ks_against_tabulated_cdf(self):
        samples = rf_sample(FIG8, block_rng(5, 2), 20_000)
        assert ks_against(lambda g: rf_cdf(FIG8, g), samples).pvalue > 0.01

    @pytest.mark.slow
    @pytest.mark.parametrize("params", CASES)
    def test_ks_million(self, params):
        samples = rf_sample(params, block_rng(13, 0), 1_000_000)
        result = stats.kstest(samples, lambda g: rf_cdf(params, g))
        assert result.statistic < 1.628 / math.sqrt(samples.size)

    def test_rejects_empty_draw(self):
        with pytest.raises(DomainError):
            rf_sample(FIG2, block_rng(1, 0), 0)
