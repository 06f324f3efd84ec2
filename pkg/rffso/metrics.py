"""
Secrecy metrics of the DF RF-FSO relay with an FSO-hop eavesdropper.

- sop_lower / sop_lower_asymptotic: lower bound of the secrecy outage probability
- spsc / spsc_asymptotic: probability of strictly positive secrecy capacity
- ip / ip_asymptotic: intercept probability
- *_quadrature: numerical-integration oracles built from the channel
  primitives only (no metric G function), including the exact SOP

Closed forms sum one G^{3s_e+1, 3s_d}_{s_M+1, s_E+1} instance per (q_d, q_e)
pair; asymptotic forms keep its leading left-pole residues.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Tuple

from scipy import integrate

from .config import QUAD_TOL
from .errors import DomainError, QuadratureError
from .fso_channel import FsoParams, fso_cdf, fso_derive, fso_pdf
from .rf_channel import RfParams, rf_cdf, rf_cdf_series
from .specfun import MeijerGSpec, meijer_g, meijer_g_asymptotic

logger = logging.getLogger(__name__)

_KERNEL_RTOL = 1e-9
_RANGE_SLACK = 1e-9
_QUAD_LIMIT = 400


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    ASYMPTOTIC = "asymptotic"
    QUADRATURE = "quadrature_oracle"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class ScenarioConfig:
    """One operating point: S-R link, legitimate and eavesdropper FSO links, target rate."""

    rf: RfParams
    fso_d: FsoParams
    fso_e: FsoParams
    target_rate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_rate", float(self.target_rate))
        if not (self.target_rate >= 0.0 and math.isfinite(self.target_rate)):
            raise DomainError(f"target_rate must be a finite value >= 0, got {self.target_rate}")

    @property
    def phi(self) -> float:
        return 2.0 ** (2.0 * self.target_rate)


@dataclass(frozen=True)
class SecrecyResult:
    value: float
    method: Method
    error_estimate: float
    metric: str = ""
    in_range: bool = True

    def __post_init__(self) -> None:
        in_range = -_RANGE_SLACK <= self.value <= 1.0 + _RANGE_SLACK
        if self.method is not Method.ASYMPTOTIC and not in_range:
            raise DomainError(f"{self.metric or 'probability'} out of [0, 1]: {self.value}")
        object.__setattr__(self, "in_range", in_range)


@dataclass(frozen=True)
class AsymptoticTerms:
    """Structure of the metric G instance and its large-U_d expansion.

    exponents are the powers L1_p - 1 of the argument, one per leading
    residue p = 1..3 s_d; r_coeff is the summed RF prefactor (1 - F_r(phi - 1)).
    """

    s_m: int
    s_e: int
    l1: Tuple[float, ...]
    l2: Tuple[float, ...]
    r_coeff: float
    exponents: Tuple[float, ...]


def _clip(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def secrecy_g_spec(cfg: ScenarioConfig, q_d: int, q_e: int) -> MeijerGSpec:
    """G instance of the (q_d, q_e) term: upper (1 - l_d2, 1, l_e1), lower (l_e2, 0, 1 - l_d1)."""
    der_d = fso_derive(cfg.fso_d)
    der_e = fso_derive(cfg.fso_e)
    upper = tuple(1.0 - v for v in der_d.l2(q_d)) + (1.0,) + der_e.l1
    lower = der_e.l2(q_e) + (0.0,) + tuple(1.0 - v for v in der_d.l1)
    return MeijerGSpec(m=3 * cfg.fso_e.s + 1, n=3 * cfg.fso_d.s, a_params=upper, b_params=lower)


def _log_metric_argument(cfg: ScenarioConfig, phi: float) -> float:
    der_d = fso_derive(cfg.fso_d)
    der_e = fso_derive(cfg.fso_e)
    return (
        der_e.log_z4 + math.log(cfg.fso_d.u_elec)
        - der_d.log_z4 - math.log(phi) - math.log(cfg.fso_e.u_elec)
    )


def _dominance_sum(cfg: ScenarioConfig, phi: float, asymptotic: bool = False) -> Tuple[float, int]:
    """sum_{q_d, q_e} B3 w_qd C3 w_qe G[...], i.e. Pr{gamma_d < phi gamma_e}.

    Returns the sum and the number of G terms evaluated.
    """
    der_d = fso_derive(cfg.fso_d)
    der_e = fso_derive(cfg.fso_e)
    log_arg = _log_metric_argument(cfg, phi)
    kernel = meijer_g_asymptotic if asymptotic else meijer_g
    total = 0.0
    count = 0
    for q_d in range(1, cfg.fso_d.b + 1):
        log_wd = der_d.log_cdf_weight(q_d)
        if log_wd == -math.inf:
            continue
        for q_e in range(1, cfg.fso_e.b + 1):
            log_we = der_e.log_cdf_weight(q_e)
            if log_we == -math.inf:
                continue
            value = kernel(secrecy_g_spec(cfg, q_d, q_e), log_x=log_arg)
            total += math.exp(log_wd + log_we) * value
            count += 1
    return total, count


def asymptotic_terms(cfg: ScenarioConfig, q_d: int = 1, q_e: int = 1) -> AsymptoticTerms:
    spec = secrecy_g_spec(cfg, q_d, q_e)
    s_d, s_e = cfg.fso_d.s, cfg.fso_e.s
    phi = cfg.phi
    r_coeff = rf_cdf_series(cfg.rf, phi - 1.0).survival
    return AsymptoticTerms(
        s_m=s_e + 3 * s_d,
        s_e=3 * s_e + s_d,
        l1=spec.a_params,
        l2=spec.b_params,
        r_coeff=_clip(r_coeff),
        exponents=tuple(v - 1.0 for v in spec.a_params[: spec.n]),
    )


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def _relay_survival(cfg: ScenarioConfig) -> Tuple[float, float]:
    series = rf_cdf_series(cfg.rf, cfg.phi - 1.0)
    return _clip(series.survival), series.tail_bound


def sop_lower(cfg: ScenarioConfig) -> SecrecyResult:
    """Lower bound 1 - (1 - F_r(phi - 1)) (1 - Pr{gamma_d < phi gamma_e})."""
    survival, tail = _relay_survival(cfg)
    dominance, count = _dominance_sum(cfg, cfg.phi)
    value = 1.0 - survival * (1.0 - _clip(dominance))
    return SecrecyResult(
        value=_clip(value),
        method=Method.CLOSED_FORM,
        error_estimate=tail + _KERNEL_RTOL * count,
        metric="sop_lower",
    )


def sop_lower_asymptotic(cfg: ScenarioConfig) -> SecrecyResult:
    """Large-U_d form of sop_lower; reported unclamped with an in_range flag."""
    survival, tail = _relay_survival(cfg)
    dominance, _ = _dominance_sum(cfg, cfg.phi, asymptotic=True)
    value = 1.0 - survival * (1.0 - dominance)
    return SecrecyResult(value=value, method=Method.ASYMPTOTIC, error_estimate=tail, metric="sop_lower")


def ip(cfg: ScenarioConfig) -> SecrecyResult:
    """Pr{gamma_d < gamma_e}."""
    dominance, count = _dominance_sum(cfg, 1.0)
    return SecrecyResult(
        value=_clip(dominance),
        method=Method.CLOSED_FORM,
        error_estimate=_KERNEL_RTOL * count,
        metric="ip",
    )


def spsc(cfg: ScenarioConfig) -> SecrecyResult:
    """Pr{gamma_d > gamma_e}; the S-R hop always carries a positive rate."""
    dominance, count = _dominance_sum(cfg, 1.0)
    return SecrecyResult(
        value=1.0 - _clip(dominance),
        method=Method.CLOSED_FORM,
        error_estimate=_KERNEL_RTOL * count,
        metric="spsc",
    )


def ip_asymptotic(cfg: ScenarioConfig) -> SecrecyResult:
    dominance, _ = _dominance_sum(cfg, 1.0, asymptotic=True)
    return SecrecyResult(value=dominance, method=Method.ASYMPTOTIC, error_estimate=0.0, metric="ip")


def spsc_asymptotic(cfg: ScenarioConfig) -> SecrecyResult:
    dominance, _ = _dominance_sum(cfg, 1.0, asymptotic=True)
    return SecrecyResult(value=1.0 - dominance, method=Method.ASYMPTOTIC, error_estimate=0.0, metric="spsc")


# ---------------------------------------------------------------------------
# Quadrature oracles
# ---------------------------------------------------------------------------

def _support(params: FsoParams, mass: float) -> Tuple[float, float]:
    """SNR interval outside which the link carries at most `mass` probability per side."""
    lo = params.u_elec
    for _ in range(60):
        if fso_cdf(params, lo) <= mass:
            break
        lo *= 0.1
    else:
        raise QuadratureError(f"lower support of the FSO SNR not found (U={params.u_elec})", partial_value=lo)
    hi = params.u_elec
    for _ in range(60):
        if 1.0 - fso_cdf(params, hi) <= mass:
            break
        hi *= 10.0
    else:
        raise QuadratureError(f"upper support of the FSO SNR not found (U={params.u_elec})", partial_value=hi)
    return lo, hi


def _dominance_integral(cfg: ScenarioConfig, scale: float, offset: float, tol: float) -> Tuple[float, float]:
    """int F_d(scale g + offset) f_e(g) dg, integrated in ln g over the support of f_e."""
    lo, hi = _support(cfg.fso_e, 1e-2 * tol)

    def integrand(u: float) -> float:
        g = math.exp(u)
        return fso_cdf(cfg.fso_d, scale * g + offset) * fso_pdf(cfg.fso_e, g) * g

    value, abserr = integrate.quad(
        integrand, math.log(lo), math.log(hi), epsabs=0.1 * tol, epsrel=tol, limit=_QUAD_LIMIT
    )
    if not abserr <= 10.0 * tol:
        raise QuadratureError(
            f"dominance integral missed its tolerance (abserr={abserr:.3g})", partial_value=value
        )
    # F_d is monotone, so its value at the support edge stands in for the clipped tails
    below = fso_cdf(cfg.fso_e, lo) * fso_cdf(cfg.fso_d, scale * lo + offset)
    above = (1.0 - fso_cdf(cfg.fso_e, hi)) * fso_cdf(cfg.fso_d, scale * hi + offset)
    logger.debug("dominance integral %.10g over [%.3g, %.3g], abserr %.3g", value, lo, hi, abserr)
    return value + below + above, abserr


def _outage_quadrature(cfg: ScenarioConfig, offset_of: Callable[[float], float], tol: float,
                       metric: str) -> SecrecyResult:
    phi = cfg.phi
    relay_outage = rf_cdf(cfg.rf, phi - 1.0)
    dominance, abserr = _dominance_integral(cfg, phi, offset_of(phi), tol)
    value = relay_outage + (1.0 - relay_outage) * _clip(dominance)
    return SecrecyResult(value=_clip(value), method=Method.QUADRATURE, error_estimate=abserr, metric=metric)


def sop_exact_quadrature(cfg: ScenarioConfig, tol: float = QUAD_TOL) -> SecrecyResult:
    """Exact SOP, F_r(phi-1) + (1 - F_r(phi-1)) int F_d(phi g + phi - 1) f_e(g) dg."""
    return _outage_quadrature(cfg, lambda phi: phi - 1.0, tol, "sop")


def sop_lower_quadrature(cfg: ScenarioConfig, tol: float = QUAD_TOL) -> SecrecyResult:
    return _outage_quadrature(cfg, lambda phi: 0.0, tol, "sop_lower")


def ip_quadrature(cfg: ScenarioConfig, tol: float = QUAD_TOL) -> SecrecyResult:
    dominance, abserr = _dominance_integral(cfg, 1.0, 0.0, tol)
    return SecrecyResult(value=_clip(dominance), method=Method.QUADRATURE, error_estimate=abserr, metric="ip")


def spsc_quadrature(cfg: ScenarioConfig, tol: float = QUAD_TOL) -> SecrecyResult:
    dominance, abserr = _dominance_integral(cfg, 1.0, 0.0, tol)
    return SecrecyResult(
        value=1.0 - _clip(dominance), method=Method.QUADRATURE, error_estimate=abserr, metric="spsc"
    )
