"""
Malaga (M) turbulence FSO link with zero-boresight pointing error.

The R-D and R-E hops share this model. Densities and CDFs are finite sums over
q = 1..b of Meijer G instances; every coefficient is kept in log space so that
r_scatter = 0 (the Gamma-Gamma corner) folds to a single surviving q = b term.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
from scipy import special

from .errors import DomainError
from .specfun import MeijerGSpec, ln_gamma, meijer_g

logger = logging.getLogger(__name__)

# r -> 0+ stand-in for the lognormal corner
LOGNORMAL_SCATTER = 1e-4


@dataclass(frozen=True)
class FsoParams:
    """Malaga link parameters.

    Attributes:
        a: large-scale turbulence parameter.
        b: small-scale severity, a positive integer.
        eps: pointing-error ratio (beam radius over jitter).
        s: 1 for heterodyne detection, 2 for IM/DD.
        r_scatter: average power of the off-axis scatter.
        zeta_t: average power of the coherent contributions.
        u_elec: electrical SNR, linear.
    """

    a: float
    b: int
    eps: float
    s: int
    r_scatter: float
    zeta_t: float
    u_elec: float

    def __post_init__(self) -> None:
        for name in ("b", "s"):
            value = getattr(self, name)
            if isinstance(value, (bool, np.bool_)) or not float(value).is_integer():
                raise DomainError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("a", "eps", "r_scatter", "zeta_t", "u_elec"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.a > 0.0:
            raise DomainError(f"a must be > 0, got {self.a}")
        if self.b < 1:
            raise DomainError(f"b must be >= 1, got {self.b}")
        if not self.eps > 0.0:
            raise DomainError(f"eps must be > 0, got {self.eps}")
        if self.s not in (1, 2):
            raise DomainError(f"s must be 1 (HD) or 2 (IM/DD), got {self.s}")
        if not (self.r_scatter >= 0.0 and self.zeta_t >= 0.0):
            raise DomainError("r_scatter and zeta_t must be >= 0")
        if not self.r_scatter + self.zeta_t > 0.0:
            raise DomainError("r_scatter + zeta_t must be > 0")
        if not (self.u_elec > 0.0 and math.isfinite(self.u_elec)):
            raise DomainError(f"u_elec must be a positive finite SNR, got {self.u_elec}")

    @classmethod
    def gamma_gamma(cls, a: float, b: int, eps: float, s: int, u_elec: float) -> "FsoParams":
        return cls(a=a, b=b, eps=eps, s=s, r_scatter=0.0, zeta_t=1.0, u_elec=u_elec)

    @classmethod
    def rice_nakagami(cls, a: float, b: int, eps: float, s: int, r_scatter: float, zeta_t: float,
                      u_elec: float) -> "FsoParams":
        return cls(a=a, b=b, eps=eps, s=s, r_scatter=r_scatter, zeta_t=zeta_t, u_elec=u_elec)

    @classmethod
    def lognormal(cls, a: float, b: int, eps: float, s: int, zeta_t: float, u_elec: float) -> "FsoParams":
        return cls(a=a, b=b, eps=eps, s=s, r_scatter=LOGNORMAL_SCATTER, zeta_t=zeta_t, u_elec=u_elec)

    @classmethod
    def k_distribution(cls, a: float, eps: float, s: int, r_scatter: float, zeta_t: float,
                       u_elec: float) -> "FsoParams":
        return cls(a=a, b=1, eps=eps, s=s, r_scatter=r_scatter, zeta_t=zeta_t, u_elec=u_elec)

    @classmethod
    def from_average_snr(cls, a: float, b: int, eps: float, s: int, r_scatter: float, zeta_t: float,
                         phi_m: float) -> "FsoParams":
        """Build the link from its average SNR phi_m instead of U."""
        u_elec = fso_electrical_snr(a, b, eps, s, r_scatter, zeta_t, phi_m)
        return cls(a=a, b=b, eps=eps, s=s, r_scatter=r_scatter, zeta_t=zeta_t, u_elec=u_elec)

    def with_u(self, u_elec: float) -> "FsoParams":
        return replace(self, u_elec=u_elec)


def fso_zeta_t(h0: float, rho: float, theta_x: float, theta_y: float) -> Tuple[float, float]:
    """LOS power zeta and total coherent power zeta_t from the micro-parameters.

    Args:
        h0: average power of the total scatter components.
        rho: fraction of the scatter power coupled to the LOS, in [0, 1].
        theta_x, theta_y: deterministic phases of the LOS and coupled terms.
    """
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")
    if not h0 >= 0.0:
        raise DomainError(f"h0 must be >= 0, got {h0}")
    zeta = 2.0 * h0 * (1.0 - rho)
    zeta_t = zeta + 2.0 * h0 * rho + math.sqrt(2.0 * h0 * rho * zeta) * math.cos(theta_x - theta_y)
    return zeta, zeta_t


def fso_electrical_snr(a: float, b: int, eps: float, s: int, r_scatter: float, zeta_t: float,
                       phi_m: float) -> float:
    """Electrical SNR U from the average SNR phi_m (identity for HD)."""
    if not phi_m > 0.0:
        raise DomainError(f"phi_m must be > 0, got {phi_m}")
    if s == 1:
        return float(phi_m)
    if s != 2:
        raise DomainError(f"s must be 1 (HD) or 2 (IM/DD), got {s}")
    e2 = eps * eps
    r, zt = r_scatter, zeta_t
    numerator = a * e2 * (e2 + 2.0) * (r + zt)
    denominator = (e2 + 1.0) ** 2 * (a + 1.0) * (2.0 * r * (r + 2.0 * zt) + zt * zt * (1.0 + 1.0 / b))
    return numerator / denominator * phi_m


@dataclass(frozen=True)
class FsoDerived:
    """Coefficient tables of an FsoParams.

    The per-q tables are indexed by q - 1. At r_scatter = 0 the reported z1 and
    j/h/w tables carry the r-power folded in, so only q = b is non-zero and
    every entry stays finite.
    """

    params: FsoParams
    z1: float
    z2: float
    z3: float
    z4: float
    log_z2: float
    log_z4: float
    l1: Tuple[float, ...]
    j_table: Tuple[float, ...]
    h_table: Tuple[float, ...]
    w_table: Tuple[float, ...]
    log_pdf_weights: Tuple[float, ...]
    log_cdf_weights: Tuple[float, ...]
    irradiance_scale: float

    def _check_q(self, q: int) -> int:
        if not 1 <= q <= self.params.b:
            raise DomainError(f"q must lie in [1, {self.params.b}], got {q}")
        return q - 1

    def j_of(self, q: int) -> float:
        return self.j_table[self._check_q(q)]

    def h_of(self, q: int) -> float:
        return self.h_table[self._check_q(q)]

    def w_of(self, q: int) -> float:
        return self.w_table[self._check_q(q)]

    def log_pdf_weight(self, q: int) -> float:
        """ln(z1 h_q); -inf for terms that vanish at r = 0."""
        return self.log_pdf_weights[self._check_q(q)]

    def log_cdf_weight(self, q: int) -> float:
        """ln(z3 w_q); -inf for terms that vanish at r = 0."""
        return self.log_cdf_weights[self._check_q(q)]

    def l2(self, q: int) -> Tuple[float, ...]:
        """Lower list {eps^2/s .., a/s .., q/s ..}, s entries per group."""
        self._check_q(q)
        s = self.params.s
        e2 = self.params.eps ** 2
        return tuple(
            (base + k) / s for base in (e2, self.params.a, float(q)) for k in range(s)
        )

    def pdf_spec(self, q: int) -> MeijerGSpec:
        e2 = self.params.eps ** 2
        return MeijerGSpec(m=3, n=0, a_params=(e2 + 1.0,), b_params=(e2, self.params.a, float(q)))

    def cdf_spec(self, q: int) -> MeijerGSpec:
        s = self.params.s
        return MeijerGSpec(m=3 * s, n=1, a_params=(1.0,) + self.l1, b_params=self.l2(q) + (0.0,))


@functools.lru_cache(maxsize=1024)
def fso_derive(params: FsoParams) -> FsoDerived:
    a, b, s = params.a, params.b, params.s
    e2 = params.eps ** 2
    r, zt = params.r_scatter, params.zeta_t
    spread = r * b + zt
    log_spread = math.log(spread)

    log_z1_core = (
        (1 - s) * math.log(2.0)
        + math.log(e2)
        + 0.5 * a * math.log(a)
        - ln_gamma(a)
        + (b + 0.5 * a) * (math.log(b) - log_spread)
    )
    log_z2 = math.log(e2 * a * b * (r + zt) / ((e2 + 1.0) * spread))
    log_z4 = s * log_z2 - 2.0 * s * math.log(s)
    log_two_pi_power = (s - 1) * math.log(2.0 * math.pi)
    log_ab_ratio = math.log(a * b) - log_spread

    j_table, h_table, w_table = [], [], []
    log_pdf_weights, log_cdf_weights = [], []
    for q in range(1, b + 1):
        log_j_core = (
            math.log(special.comb(b - 1, q - 1, exact=True))
            + (1.0 - 0.5 * q) * log_spread
            - ln_gamma(q)
            + float(special.xlogy(q - 1, zt))
            + 0.5 * q * (math.log(a) - math.log(b))
        )
        log_h_core = log_j_core - 0.5 * (a + q) * log_ab_ratio
        # r^(b-1) in z1 against r^(1-q) in j_q
        r_power = float(special.xlogy(b - q, r))
        log_pdf = log_z1_core + log_h_core + r_power
        log_pdf_weights.append(log_pdf)
        log_cdf_weights.append(log_pdf - log_two_pi_power + (a + q - 1) * math.log(s))
        if r > 0.0:
            log_j = log_j_core - (q - 1) * math.log(r)
        else:
            log_j = log_j_core + r_power
        log_h = log_j - 0.5 * (a + q) * log_ab_ratio
        j_table.append(math.exp(log_j))
        h_table.append(math.exp(log_h))
        w_table.append(math.exp(log_h + (a + q - 1) * math.log(s)))

    log_z1 = log_z1_core + ((b - 1) * math.log(r) if r > 0.0 else 0.0)
    z1 = math.exp(log_z1)
    return FsoDerived(
        params=params,
        z1=z1,
        z2=math.exp(log_z2),
        z3=z1 / (2.0 * math.pi) ** (s - 1),
        z4=math.exp(log_z4),
        log_z2=log_z2,
        log_z4=log_z4,
        l1=tuple((e2 + k) / s for k in range(1, s + 1)),
        j_table=tuple(j_table),
        h_table=tuple(h_table),
        w_table=tuple(w_table),
        log_pdf_weights=tuple(log_pdf_weights),
        log_cdf_weights=tuple(log_cdf_weights),
        irradiance_scale=e2 * (r + zt) / (e2 + 1.0),
    )


def _weighted_sum(weights, values) -> float:
    total = 0.0
    for log_w, value in zip(weights, values):
        if value == 0.0 or log_w == -math.inf:
            continue
        total += math.copysign(math.exp(min(log_w + math.log(abs(value)), 709.0)), value)
    return total


def fso_pdf(params: FsoParams, gamma: float) -> float:
    """Density of the FSO SNR, (z1/gamma) sum_q h_q G^{3,0}_{1,3}[z2 (gamma/U)^(1/s)]."""
    gamma = float(gamma)
    if not gamma > 0.0:
        raise DomainError(f"fso_pdf requires gamma > 0, got {gamma}")
    der = fso_derive(params)
    log_gamma = math.log(gamma)
    log_arg = der.log_z2 + (log_gamma - math.log(params.u_elec)) / params.s
    weights = [lw - log_gamma for lw in der.log_pdf_weights]
    values = [
        meijer_g(der.pdf_spec(q), log_x=log_arg) if lw != -math.inf else 0.0
        for q, lw in enumerate(der.log_pdf_weights, start=1)
    ]
    return max(_weighted_sum(weights, values), 0.0)


def fso_cdf(params: FsoParams, gamma: float) -> float:
    """CDF of the FSO SNR, z3 sum_q w_q G^{3s,1}_{s+1,3s+1}[(z4/U) gamma]."""
    gamma = float(gamma)
    if not gamma >= 0.0:
        raise DomainError(f"fso_cdf requires gamma >= 0, got {gamma}")
    if gamma == 0.0:
        return 0.0
    der = fso_derive(params)
    log_arg = der.log_z4 + math.log(gamma) - math.log(params.u_elec)
    values = [
        meijer_g(der.cdf_spec(q), log_x=log_arg) if lw != -math.inf else 0.0
        for q, lw in enumerate(der.log_cdf_weights, start=1)
    ]
    return min(max(_weighted_sum(der.log_cdf_weights, values), 0.0), 1.0)


def fso_irradiance(params: FsoParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Normalized irradiance I / E[I] from the generative Malaga construction.

    I = X Y h_p with X ~ Gamma(a, 1/a), Y = |D + Z|^2 where |D|^2 ~ Gamma(b, zeta_t/b)
    and Z circular complex Gaussian of power r, and h_p = u^(1/eps^2).
    """
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n}")
    large_scale = rng.gamma(params.a, 1.0 / params.a, size=n)
    if params.zeta_t > 0.0:
        coherent = np.sqrt(rng.gamma(params.b, params.zeta_t / params.b, size=n))
    else:
        coherent = np.zeros(n)
    # Z is circular, so the phase of D can be fixed to zero
    spread = math.sqrt(0.5 * params.r_scatter)
    z_re = rng.normal(0.0, 1.0, size=n) * spread
    z_im = rng.normal(0.0, 1.0, size=n) * spread
    small_scale = (coherent + z_re) ** 2 + z_im ** 2
    pointing = rng.random(size=n) ** (1.0 / params.eps ** 2)
    der = fso_derive(params)
    return large_scale * small_scale * pointing / der.irradiance_scale


def fso_sample(params: FsoParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n FSO SNRs, gamma = U (I / E[I])^s."""
    return params.u_elec * fso_irradiance(params, rng, n) ** params.s
