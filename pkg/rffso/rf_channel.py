"""
alpha-kappa-mu shadowed (AKM-shadowed) RF link, the S-R hop.

The density is a Negative-Binomial mixture over i of Gamma(mu + i) densities
in t = A2 * gamma^(alpha/2); the CDF sums regularized incomplete gammas over
that mixture with an adaptive tail bound.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special

from .config import RF_I_MAX, RF_TAIL_RTOL
from .errors import DomainError, TruncationError
from .specfun import hyp2f1, ln_gamma, log_hyp1f1

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# stand-in for x -> infinity in the limiting special cases
LARGE_SHADOWING = 1e4


@dataclass(frozen=True)
class RfParams:
    """AKM-shadowed link parameters; phi_r is the average SNR in linear scale."""

    alpha: float
    kappa: float
    mu: int
    x_shadow: float
    phi_r: float

    def __post_init__(self) -> None:
        mu = self.mu
        if isinstance(mu, (bool, np.bool_)) or not float(mu).is_integer():
            raise DomainError(f"mu must be a positive integer (finite incomplete-gamma sum), got {mu!r}")
        object.__setattr__(self, "mu", int(mu))
        for name in ("alpha", "kappa", "x_shadow", "phi_r"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.alpha > 0.0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not self.kappa >= 0.0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")
        if self.mu < 1:
            raise DomainError(f"mu must be >= 1, got {self.mu}")
        if not self.x_shadow > 0.0:
            raise DomainError(f"x_shadow must be > 0, got {self.x_shadow}")
        if not (self.phi_r > 0.0 and math.isfinite(self.phi_r)):
            raise DomainError(f"phi_r must be a positive finite SNR, got {self.phi_r}")

    @classmethod
    def rayleigh(cls, phi_r: float) -> "RfParams":
        return cls(alpha=2.0, kappa=0.0, mu=1, x_shadow=1.0, phi_r=phi_r)

    @classmethod
    def nakagami(cls, m: int, phi_r: float) -> "RfParams":
        return cls(alpha=2.0, kappa=0.0, mu=m, x_shadow=1.0, phi_r=phi_r)

    @classmethod
    def kappa_mu(cls, kappa: float, mu: int, phi_r: float) -> "RfParams":
        return cls(alpha=2.0, kappa=kappa, mu=mu, x_shadow=LARGE_SHADOWING, phi_r=phi_r)

    @classmethod
    def eta_mu(cls, eta: float, mu: float, phi_r: float) -> "RfParams":
        """eta-mu (format 1): kappa = (1 - eta) / (2 eta), 2 mu clusters, x = mu."""
        if not 0.0 < eta <= 1.0:
            raise DomainError(f"eta must lie in (0, 1], got {eta}")
        return cls(alpha=2.0, kappa=(1.0 - eta) / (2.0 * eta), mu=2.0 * mu, x_shadow=mu, phi_r=phi_r)

    @classmethod
    def weibull(cls, alpha: float, phi_r: float) -> "RfParams":
        return cls(alpha=alpha, kappa=0.0, mu=1, x_shadow=1.0, phi_r=phi_r)

    @classmethod
    def alpha_kappa_mu(cls, alpha: float, kappa: float, mu: int, phi_r: float) -> "RfParams":
        return cls(alpha=alpha, kappa=kappa, mu=mu, x_shadow=LARGE_SHADOWING, phi_r=phi_r)

    def with_phi(self, phi_r: float) -> "RfParams":
        return replace(self, phi_r=phi_r)


@dataclass(frozen=True)
class RfDerived:
    """Closed-form constants of an RfParams.

    a1, a2, a3 are the density coefficients; k_ratio = mu kappa / (mu kappa + x)
    is the success parameter of the mixture weights
    w_i = (1 - k)^x (x)_i k^i / i!, and c_norm maps the sampler's
    normalized cluster power to the SNR scale.
    """

    params: RfParams
    d_const: float
    a1: float
    a2: float
    a3: float
    log_a1: float
    log_a2: float
    k_ratio: float
    c_norm: float

    def log_weights(self, count: int) -> np.ndarray:
        """ln w_i for i = 0 .. count - 1."""
        i = np.arange(count, dtype=float)
        if self.k_ratio == 0.0:
            out = np.full(count, -np.inf)
            out[0] = 0.0
            return out
        x = self.params.x_shadow
        mu_kappa = self.params.mu * self.params.kappa
        return (
            -x * math.log1p(mu_kappa / x)
            + special.gammaln(x + i)
            - special.gammaln(x)
            - special.gammaln(i + 1.0)
            + i * math.log(self.k_ratio)
        )

    def a4_of(self, i: int) -> float:
        """Coefficient of the i-th term of the 1F1 expansion, (x)_i A3^i / ((mu)_i i!)."""
        if i < 0:
            raise DomainError(f"series index must be >= 0, got {i}")
        if i == 0:
            return 1.0
        if self.a3 == 0.0:
            return 0.0
        x, mu = self.params.x_shadow, self.params.mu
        return math.exp(
            special.gammaln(x + i) - special.gammaln(x)
            - special.gammaln(mu + i) + special.gammaln(mu)
            + i * math.log(self.a3) - special.gammaln(i + 1.0)
        )

    def a5_of(self, i: int, j: int) -> float:
        """CDF double-sum coefficient A4 Gamma(mu + i) / (j! A2^(mu + i - j))."""
        order = self.params.mu + i
        if not 0 <= j < order:
            raise DomainError(f"j must lie in [0, {order - 1}], got {j}")
        a4 = self.a4_of(i)
        if a4 == 0.0:
            return 0.0
        return math.exp(
            math.log(a4) + special.gammaln(order) - special.gammaln(j + 1.0) - (order - j) * self.log_a2
        )


@functools.lru_cache(maxsize=1024)
def rf_derive(params: RfParams) -> RfDerived:
    alpha, kappa, mu, x, phi = params.alpha, params.kappa, params.mu, params.x_shadow, params.phi_r
    mu_kappa = mu * kappa
    k_ratio = mu_kappa / (mu_kappa + x)
    log_shadow = x * math.log1p(mu_kappa / x)  # ln ((mu kappa + x) / x)^x
    log_f = math.log(hyp2f1(x, mu + 2.0 / alpha, mu, k_ratio))
    log_d = 0.5 * alpha * (log_shadow + ln_gamma(mu) - ln_gamma(mu + 2.0 / alpha) - log_f)
    log_a2 = -log_d - 0.5 * alpha * math.log(phi)
    log_a1 = (
        -log_shadow
        + math.log(alpha)
        - 0.5 * alpha * mu * math.log(phi)
        - math.log(2.0)
        - mu * log_d
        - ln_gamma(mu)
    )
    d_const = math.exp(log_d)
    a2 = math.exp(log_a2)
    return RfDerived(
        params=params,
        d_const=d_const,
        a1=math.exp(log_a1),
        a2=a2,
        a3=k_ratio * a2,
        log_a1=log_a1,
        log_a2=log_a2,
        k_ratio=k_ratio,
        c_norm=(d_const * mu * (1.0 + kappa)) ** (2.0 / alpha),
    )


def rf_pdf(params: RfParams, gamma: float) -> float:
    """Density of the S-R SNR via the 1F1 closed form."""
    gamma = float(gamma)
    if not gamma > 0.0:
        raise DomainError(f"rf_pdf requires gamma > 0, got {gamma}")
    der = rf_derive(params)
    log_gamma = math.log(gamma)
    t = math.exp(der.log_a2 + 0.5 * params.alpha * log_gamma)
    log_f1, _ = log_hyp1f1(params.x_shadow, params.mu, der.k_ratio * t)
    log_density = der.log_a1 + (0.5 * params.alpha * params.mu - 1.0) * log_gamma - t + log_f1
    return math.exp(log_density) if log_density < 709.0 else math.inf


def rf_pdf_series(params: RfParams, gamma: float, n_terms: Optional[int] = None) -> float:
    """Density of the S-R SNR as the term-by-term i-series.

    Args:
        params: link parameters.
        gamma: SNR, > 0.
        n_terms: number of series terms; by default enough to pass the
            peak of the terms by a wide margin.
    """
    gamma = float(gamma)
    if not gamma > 0.0:
        raise DomainError(f"rf_pdf_series requires gamma > 0, got {gamma}")
    der = rf_derive(params)
    log_gamma = math.log(gamma)
    t = math.exp(der.log_a2 + 0.5 * params.alpha * log_gamma)
    if der.a3 == 0.0:
        n_terms = 1
    elif n_terms is None:
        centre = der.k_ratio * t
        n_terms = int(2.0 * centre + 10.0 * math.sqrt(centre) + 60)
    i = np.arange(n_terms, dtype=float)
    x, mu = params.x_shadow, params.mu
    log_a4 = (
        special.gammaln(x + i) - special.gammaln(x)
        - special.gammaln(mu + i) + special.gammaln(mu)
        - special.gammaln(i + 1.0)
    )
    if der.a3 > 0.0:
        log_a4 = log_a4 + i * math.log(der.a3)
    log_terms = der.log_a1 + log_a4 + (0.5 * params.alpha * (mu + i) - 1.0) * log_gamma - t
    return float(np.exp(special.logsumexp(log_terms)))


@dataclass(frozen=True)
class RfSeries:
    """Adaptive mixture-series evaluation of the S-R CDF."""

    cdf: ArrayLike
    survival: ArrayLike
    tail_bound: float
    n_terms: int


def _mixture_length(der: RfDerived, i_max: int, rtol: float) -> Tuple[int, float]:
    """Number of mixture terms whose neglected tail is below rtol of their mass."""
    if der.k_ratio == 0.0:
        return 1, 0.0
    x, k = der.params.x_shadow, der.k_ratio
    i = np.arange(i_max + 1, dtype=float)
    weights = np.exp(der.log_weights(i_max + 1))
    following = weights * (x + i) * k / (i + 1.0)
    # sup of w_{j+1}/w_j over j > i; the ratio is monotone in j and tends to k
    rho = np.maximum((x + i + 1.0) * k / (i + 2.0), k)
    with np.errstate(divide="ignore"):
        tail = np.where(rho < 1.0, following / (1.0 - rho), np.inf)
    settled = tail <= rtol * np.cumsum(weights)
    if not settled.any():
        raise TruncationError(
            f"AKM-shadowed mixture tail above {rtol:g} after {i_max + 1} terms "
            f"(x={x}, k={k:.4g}); raise i_max",
            partial_value=float(np.sum(weights)),
            iterations=i_max + 1,
        )
    first = int(np.argmax(settled))
    return first + 1, float(tail[first])


def rf_cdf_series(
    params: RfParams,
    gamma: ArrayLike,
    i_max: int = RF_I_MAX,
    rtol: float = RF_TAIL_RTOL,
) -> RfSeries:
    """CDF and survival of the S-R SNR by the truncated mixture series.

    Term i contributes w_i * P(mu + i, t) to the CDF and w_i * Q(mu + i, t) to
    the survival, with t = A2 gamma^(alpha/2) and P, Q the regularized
    incomplete gammas; Q(mu + i, t) is the finite j-sum
    e^(-t) sum_{j < mu + i} t^j / j!. Both sums are free of cancellation.
    """
    values = np.asarray(gamma, dtype=float)
    if np.any(~(values >= 0.0)):
        raise DomainError("rf_cdf requires gamma >= 0")
    der = rf_derive(params)
    count, tail = _mixture_length(der, i_max, rtol)
    weights = np.exp(der.log_weights(count))
    with np.errstate(divide="ignore"):
        t = np.exp(der.log_a2 + 0.5 * params.alpha * np.log(values))
    cdf = np.zeros_like(t)
    survival = np.zeros_like(t)
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        cdf += w * special.gammainc(params.mu + i, t)
        survival += w * special.gammaincc(params.mu + i, t)
    logger.debug("rf mixture: %d terms, tail bound %.3g", count, tail)
    if values.ndim == 0:
        return RfSeries(float(cdf), float(survival), tail, count)
    return RfSeries(cdf, survival, tail, count)


def rf_cdf(params: RfParams, gamma: ArrayLike, i_max: int = RF_I_MAX) -> ArrayLike:
    """CDF of the S-R SNR, F(0) = 0 exactly."""
    series = rf_cdf_series(params, gamma, i_max)
    return np.clip(series.cdf, 0.0, 1.0) if np.ndim(series.cdf) else min(max(series.cdf, 0.0), 1.0)


def rf_ccdf(params: RfParams, gamma: ArrayLike, i_max: int = RF_I_MAX) -> ArrayLike:
    """Survival 1 - F of the S-R SNR without forming the difference."""
    series = rf_cdf_series(params, gamma, i_max)
    return np.clip(series.survival, 0.0, 1.0) if np.ndim(series.survival) else min(max(series.survival, 0.0), 1.0)


def rf_sample(params: RfParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n S-R SNRs from the physical AKM-shadowed construction.

    mu clusters of unit-variance complex Gaussians, the dominant in-phase
    components sqrt(kappa) * xi shadowed by xi^2 ~ Gamma(x, 1/x). The total
    power S has mean mu (1 + kappa), and gamma = phi_r c_norm (S / E[S])^(2/alpha).
    """
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n}")
    der = rf_derive(params)
    scale = math.sqrt(0.5)
    in_phase = rng.normal(0.0, scale, size=(n, params.mu))
    quadrature = rng.normal(0.0, scale, size=(n, params.mu))
    if params.kappa > 0.0:
        xi = np.sqrt(rng.gamma(params.x_shadow, 1.0 / params.x_shadow, size=n))
        in_phase += (xi * math.sqrt(params.kappa))[:, None]
    power = np.sum(in_phase * in_phase + quadrature * quadrature, axis=1)
    normalized = power / (params.mu * (1.0 + params.kappa))
    return params.phi_r * der.c_norm * normalized ** (2.0 / params.alpha)
