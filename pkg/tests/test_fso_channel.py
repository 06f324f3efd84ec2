import math
import sys
from pathlib import Path

import mpmath
import numpy as np
import pytest
from scipy import integrate

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from rffso.errors import DomainError  # noqa: E402
from rffso.fso_channel import (  # noqa: E402
    FsoParams,
    fso_cdf,
    fso_derive,
    fso_electrical_snr,
    fso_irradiance,
    fso_pdf,
    fso_sample,
    fso_zeta_t,
)
from rffso.montecarlo import block_rng, ks_against  # noqa: E402
from rffso.presets import get_preset  # noqa: E402

MODERATE = FsoParams(a=4.2, b=3, eps=1.1, s=1, r_scatter=0.1, zeta_t=1.0, u_elec=10.0)
MODERATE_IMDD = FsoParams(a=4.2, b=3, eps=1.1, s=2, r_scatter=0.1, zeta_t=1.0, u_elec=10.0)
STRONG = FsoParams(a=2.296, b=2, eps=1.1, s=1, r_scatter=0.1, zeta_t=1.0, u_elec=10 ** 1.5)
WEAK_SHARP = FsoParams(a=8.0, b=4, eps=6.7, s=1, r_scatter=0.1, zeta_t=1.0, u_elec=1.0)
K_DIST = FsoParams.k_distribution(a=4.2, eps=1.1, s=2, r_scatter=0.1, zeta_t=2.0, u_elec=3.0)
CASES = [MODERATE, MODERATE_IMDD, STRONG, WEAK_SHARP, K_DIST]


def integrate_log(f, lo, hi):
    value, _ = integrate.quad(lambda u: f(math.exp(u)) * math.exp(u), math.log(lo), math.log(hi),
                              limit=400, epsabs=1e-12, epsrel=1e-10)
    return value


def gamma_gamma_pdf(a, b, eps, s, u, gamma):
    e2 = eps * eps
    h = e2 * a * b / (e2 + 1.0)
    with mpmath.workdps(30):
        g = mpmath.meijerg([[], [e2 + 1]], [[e2, a, b], []], h * (gamma / u) ** (1.0 / s))
        return float(e2 * g / (s * mpmath.gamma(a) * mpmath.gamma(b) * gamma))


def gamma_gamma_cdf_hd(a, b, eps, u, gamma):
    e2 = eps * eps
    h = e2 * a * b / (e2 + 1.0)
    with mpmath.workdps(30):
        g = mpmath.meijerg([[1], [e2 + 1]], [[e2, a, b], [0]], h * gamma / u)
        return float(e2 * g / (mpmath.gamma(a) * mpmath.gamma(b)))


class TestParams:
    def test_b_must_be_integral(self):
        with pytest.raises(DomainError):
            FsoParams(a=4.2, b=2.5, eps=1.1, s=1, r_scatter=0.1, zeta_t=1.0, u_elec=1.0)

    def test_detection_type(self):
        with pytest.raises(DomainError):
            FsoParams(a=4.2, b=2, eps=1.1, s=3, r_scatter=0.1, zeta_t=1.0, u_elec=1.0)

    def test_needs_some_power(self):
        with pytest.raises(DomainError):
            FsoParams(a=4.2, b=2, eps=1.1, s=1, r_scatter=0.0, zeta_t=0.0, u_elec=1.0)

    def test_special_cases(self):
        gg = FsoParams.gamma_gamma(a=4.2, b=2, eps=1.1, s=1, u_elec=1.0)
        assert (gg.r_scatter, gg.zeta_t) == (0.0, 1.0)
        assert FsoParams.lognormal(a=4.2, b=3, eps=1.1, s=1, zeta_t=2.0, u_elec=1.0).r_scatter == 1e-4
        assert K_DIST.b == 1


class TestZeta:
    def test_full_coupling(self):
        assert fso_zeta_t(0.5, 1.0, 0.3, -1.2) == pytest.approx((0.0, 1.0))

    def test_no_coupling(self):
        assert fso_zeta_t(0.5, 0.0, 0.3, -1.2) == pytest.approx((1.0, 1.0))

    def test_half_coupling_in_phase(self):
        assert fso_zeta_t(0.5, 0.5, 0.7, 0.7) == pytest.approx((0.5, 1.5))

    @pytest.mark.parametrize("rho", [-0.1, 1.1])
    def test_rho_range(self, rho):
        with pytest.raises(DomainError):
            fso_zeta_t(0.5, rho, 0.0, 0.0)


class TestElectricalSnr:
    def test_heterodyne_is_identity(self):
        assert fso_electrical_snr(4.2, 3, 1.1, 1, 0.1, 1.0, 10.0) == 10.0

    def test_imdd_formula(self):
        a, b, eps, r, zt = 4.2, 3, 1.1, 0.1, 1.0
        e2 = eps ** 2
        expected = (a * e2 * (e2 + 2) * (r + zt)) / ((e2 + 1) ** 2 * (a + 1) * (2 * r * (r + 2 * zt) + zt ** 2 * (1 + 1 / b)))
        assert fso_electrical_snr(a, b, eps, 2, r, zt, 1.0) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(0.40296, rel=1e-4)

    def test_imdd_limit(self):
        a = 4.2
        value = fso_electrical_snr(a, 10 ** 6, 1e3, 2, 0.0, 1.0, 1.0)
        assert value == pytest.approx(a / (a + 1.0), rel=1e-5)

    def test_from_average_snr(self):
        params = FsoParams.from_average_snr(4.2, 3, 1.1, 2, 0.1, 1.0, phi_m=10.0)
        assert params.u_elec == pytest.approx(10.0 * fso_electrical_snr(4.2, 3, 1.1, 2, 0.1, 1.0, 1.0))


class TestDerived:
    def test_heterodyne_lists(self):
        der = fso_derive(MODERATE)
        assert der.l1 == pytest.approx((2.21,))
        assert der.l2(2) == pytest.approx((1.21, 4.2, 2.0))

    def test_imdd_lists(self):
        der = fso_derive(MODERATE_IMDD)
        assert der.l1 == pytest.approx((1.105, 1.605))
        assert der.l2(2) == pytest.approx((0.605, 1.105, 2.1, 2.6, 1.0, 1.5))

    def test_gamma_gamma_single_term(self):
        params = FsoParams.gamma_gamma(a=4.2, b=1, eps=1.1, s=1, u_elec=1.0)
        der = fso_derive(params)
        assert der.j_of(1) == pytest.approx(math.sqrt(4.2))
        assert der.z2 == pytest.approx(1.21 * 4.2 / 2.21)

    def test_coefficient_block(self):
        a, b, e2, r, zt = 4.2, 3, 1.21, 0.1, 1.0
        der = fso_derive(MODERATE)
        spread = r * b + zt
        z1 = e2 * a ** (a / 2) / (r ** (1 + a / 2) * math.gamma(a)) * (r * b / spread) ** (b + a / 2)
        assert der.z1 == pytest.approx(z1, rel=1e-12)
        for q in range(1, b + 1):
            j = math.comb(b - 1, q - 1) * spread ** (1 - q / 2) / math.factorial(q - 1) * (zt / r) ** (q - 1) * (a / b) ** (q / 2)
            h = j * (a * b / spread) ** (-(a + q) / 2)
            assert der.j_of(q) == pytest.approx(j, rel=1e-12)
            assert der.h_of(q) == pytest.approx(h, rel=1e-12)
            assert der.w_of(q) == pytest.approx(h, rel=1e-12)
            assert der.log_pdf_weight(q) == pytest.approx(math.log(z1 * h), rel=1e-12, abs=1e-12)

    def test_zero_scatter_keeps_finite_tables(self):
        der = fso_derive(FsoParams.gamma_gamma(a=4.2, b=3, eps=1.1, s=2, u_elec=1.0))
        assert all(math.isfinite(w) for w in der.w_table)
        assert der.w_of(1) == 0.0 and der.w_of(2) == 0.0 and der.w_of(3) > 0.0
        assert der.log_cdf_weight(1) == -math.inf
        assert math.isfinite(der.log_cdf_weight(3))

    def test_q_range(self):
        with pytest.raises(DomainError):
            fso_derive(MODERATE).w_of(4)

    def test_irradiance_scale(self):
        der = fso_derive(MODERATE)
        assert der.irradiance_scale == pytest.approx(1.21 * 1.1 / 2.21)


@pytest.mark.parametrize("params", CASES)
def test_pdf_integrates_to_one(params):
    u = params.u_elec
    assert integrate_log(lambda g: fso_pdf(params, g), 1e-14 * u, 1e6 * u) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("params", CASES)
def test_irradiance_calibration(params):
    # E[(gamma / U)^(1/s)] = E[I] / I0 = 1
    u, s = params.u_elec, params.s
    moment = integrate_log(lambda g: (g / u) ** (1.0 / s) * fso_pdf(params, g), 1e-14 * u, 1e8 * u)
    assert moment == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("name", ["table2-gamma-gamma", "table2-rice-nakagami", "table2-lognormal",
                                  "table2-k-distribution"])
def test_pdf_far_tail_of_special_cases(name):
    fso = get_preset(name).scenario().to_config().fso_d
    density = fso_pdf(fso, 1e8 * fso.u_elec)
    assert 0.0 <= density < 1e-100


@pytest.mark.parametrize("params", CASES)
def test_pdf_non_negative(params):
    for gamma in np.geomspace(1e-6, 1e4, 100) * params.u_elec:
        assert fso_pdf(params, gamma) >= 0.0


@pytest.mark.parametrize("params", CASES)
def test_cdf_derivative_is_density(params):
    # compared as gamma f(gamma), the probability mass per unit of ln gamma
    for gamma in np.geomspace(0.05, 5.0, 15) * params.u_elec:
        h = gamma * 1e-3
        slope = (fso_cdf(params, gamma + h) - fso_cdf(params, gamma - h)) / (2.0 * h)
        assert gamma * slope == pytest.approx(gamma * fso_pdf(params, gamma), rel=1e-4, abs=1e-6)


@pytest.mark.parametrize("params", [MODERATE, MODERATE_IMDD])
@pytest.mark.parametrize("ratio", [0.1, 1.0, 4.0])
def test_cdf_matches_integrated_density(params, ratio):
    gamma = ratio * params.u_elec
    expected = integrate_log(lambda g: fso_pdf(params, g), 1e-16 * params.u_elec, gamma)
    assert fso_cdf(params, gamma) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("params", CASES)
def test_cdf_limits(params):
    assert fso_cdf(params, 0.0) == 0.0
    assert fso_cdf(params, 1e-12 * params.u_elec) < 1e-4
    assert fso_cdf(params, 1e4 * params.u_elec) == pytest.approx(1.0, abs=1e-6)


def test_domain():
    with pytest.raises(DomainError):
        fso_pdf(MODERATE, 0.0)
    with pytest.raises(DomainError):
        fso_cdf(MODERATE, -1.0)


class TestGammaGammaReduction:
    @pytest.mark.parametrize("s", [1, 2])
    @pytest.mark.parametrize("ratio", [1e-3, 0.2, 1.0, 5.0, 50.0])
    def test_pdf(self, s, ratio):
        params = FsoParams.gamma_gamma(a=4.2, b=2, eps=1.1, s=s, u_elec=2.0)
        gamma = ratio * 2.0
        assert fso_pdf(params, gamma) == pytest.approx(gamma_gamma_pdf(4.2, 2, 1.1, s, 2.0, gamma), rel=1e-8)

    @pytest.mark.parametrize("ratio", [1e-3, 0.05, 0.2, 1.0, 5.0, 50.0])
    def test_cdf(self, ratio):
        params = FsoParams.gamma_gamma(a=2.296, b=2, eps=1.1, s=1, u_elec=2.0)
        gamma = ratio * 2.0
        assert fso_cdf(params, gamma) == pytest.approx(gamma_gamma_cdf_hd(2.296, 2, 1.1, 2.0, gamma), abs=1e-7)


class TestSampler:
    def test_deterministic(self):
        first = fso_sample(MODERATE, block_rng(9, 4), 1000)
        second = fso_sample(MODERATE, block_rng(9, 4), 1000)
        assert np.array_equal(first, second)

    @pytest.mark.parametrize("params", CASES)
    def test_ks_against_closed_form(self, params):
        samples = fso_sample(params, block_rng(21, 0), 20_000)
        assert ks_against(lambda g: fso_cdf(params, g), samples).pvalue > 0.01

    def test_gamma_gamma_against_independent_oracle(self):
        params = FsoParams.gamma_gamma(a=2.296, b=2, eps=1.1, s=1, u_elec=1.0)
        samples = fso_sample(params, block_rng(22, 0), 20_000)
        result = ks_against(lambda g: gamma_gamma_cdf_hd(2.296, 2, 1.1, 1.0, g), samples, n_grid=200)
        assert result.pvalue > 0.01

    def test_detection_switch(self):
        hd = MODERATE.with_u(3.0)
        imdd = FsoParams(a=4.2, b=3, eps=1.1, s=2, r_scatter=0.1, zeta_t=1.0, u_elec=0.7)
        gamma_hd = fso_sample(hd, block_rng(4, 0), 5000)
        gamma_imdd = fso_sample(imdd, block_rng(4, 0), 5000)
        assert np.allclose(gamma_imdd, imdd.u_elec * (gamma_hd / hd.u_elec) ** 2, rtol=1e-12)
        # the closed forms agree under the same change of variables
        for gamma in (0.1, 1.0, 6.0):
            mapped = imdd.u_elec * (gamma / hd.u_elec) ** 2
            assert fso_cdf(imdd, mapped) == pytest.approx(fso_cdf(hd, gamma), abs=1e-9)

    def test_irradiance_mean(self):
        values = fso_irradiance(STRONG, block_rng(8, 0), 400_000)
        se = values.std() / math.sqrt(values.size)
        assert abs(values.mean() - 1.0) < 4.0 * se

    @pytest.mark.slow
    @pytest.mark.parametrize("params", CASES)
    def test_ks_million(self, params):
        samples = fso_sample(params, block_rng(31, 0), 1_000_000)
        result = ks_against(lambda g: fso_cdf(params, g), samples, n_grid=800)
        assert result.statistic < 1.628 / math.sqrt(samples.size)

    def test_rejects_empty_draw(self):
        with pytest.raises(DomainError):
            fso_sample(MODERATE, block_rng(1, 0), 0)


def test_gamma_gamma_cdf_oracle_is_consistent():
    # the oracle itself integrates its own density
    expected = integrate_log(lambda g: gamma_gamma_pdf(2.296, 2, 1.1, 1, 2.0, g), 1e-14, 3.0)
    assert gamma_gamma_cdf_hd(2.296, 2, 1.1, 2.0, 3.0) == pytest.approx(expected, abs=1e-8)
