"""
Special functions underlying the channel closed forms.

- ln_gamma: log-gamma with a domain check
- hyp1f1 / log_hyp1f1: confluent hypergeometric 1F1 (Taylor series, Kummer
  transformation for negative arguments, log-space result)
- hyp2f1: Gauss hypergeometric 2F1 for |z| < 1 (scipy, mpmath when scipy overflows)
- meijer_g: Meijer G function by residue series, falling back to contour quadrature
- meijer_g_contour: Mellin-Barnes vertical-contour quadrature
- meijer_g_asymptotic: leading large-argument residues

All gamma-ratio products are formed in log space with explicit sign tracking.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate, optimize, special

from .config import (
    CONTOUR_CUTOFF,
    CONTOUR_RTOL,
    G_CONDITIONING_LIMIT,
    G_SERIES_MAX_TERMS,
    G_SERIES_PATIENCE,
    G_SERIES_RTOL,
    HYP_MAX_ITERS,
)
from .errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

_EPS = float(np.finfo(float).eps)
_RESCALE = 1e200
_LOG_RESCALE = math.log(_RESCALE)
_LOG_MAX = 700.0
_CHUNK = 64
_DEFINABILITY_TOL = 1e-9
_COALESCE_TOL = 1e-5
_UNIT_BAND = math.log(4.0)  # p == q: series only when |ln x| exceeds this
_CANCELLATION_LIMIT = 100.0  # largest series term over |sum|
_EXTENDED_DPS = 40
_LOG_NEGLIGIBLE = math.log(1e-300)  # absolute contour error accepted below this
_TAYLOR_REACH = 4_000.0  # 1F1 peak term index beyond which mpmath takes over


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0.0 and float(value).is_integer()


def _scaled_exp(log_value: float) -> float:
    if log_value > 709.0:
        return math.inf
    return math.exp(log_value)


def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return float(special.gammaln(x))


# ---------------------------------------------------------------------------
# Hypergeometric series
# ---------------------------------------------------------------------------

def _hyp1f1_taylor(a: float, b: float, z: float, max_iters: int) -> Tuple[float, float, float]:
    """Taylor series of 1F1(a; b; z) for z >= 0.

    Returns (mantissa, log scale, loss) where loss is the largest term over
    the final sum, the factor by which rounding error is amplified.
    """
    total = 1.0
    term = 1.0
    peak = 1.0
    log_scale = 0.0
    for k in range(max_iters):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        peak = max(peak, abs(term))
        if term == 0.0:
            break
        if abs(total) > _RESCALE:
            total /= _RESCALE
            term /= _RESCALE
            peak /= _RESCALE
            log_scale += _LOG_RESCALE
        ratio = abs((a + k + 1) / (b + k + 1) * z / (k + 2))
        if ratio < 1.0 and abs(term) <= _EPS * abs(total):
            break
    else:
        partial = math.copysign(_scaled_exp(log_scale + math.log(abs(total))), total) if total else 0.0
        raise ConvergenceError(
            f"1F1({a}; {b}; {z}) did not converge in {max_iters} terms",
            partial_value=partial,
            iterations=max_iters,
        )
    loss = peak / abs(total) if total else math.inf
    return total, log_scale, loss


def _log_hyp1f1_extended(a: float, b: float, z: float) -> Tuple[float, float]:
    with mpmath.workdps(_EXTENDED_DPS):
        value = mpmath.re(mpmath.hyp1f1(a, b, z))
        if value == 0:
            return -math.inf, 0.0
        return float(mpmath.log(abs(value))), float(mpmath.sign(value))


def log_hyp1f1(a: float, b: float, z: float, max_iters: int = HYP_MAX_ITERS) -> Tuple[float, float]:
    """Return (ln|1F1(a; b; z)|, sign).

    Negative arguments go through Kummer's transformation
    1F1(a; b; z) = e^z 1F1(b - a; b; -z), so the summed series never alternates
    for a, b > 0. Series that lose more than two digits to cancellation, or
    whose terms peak too far out to be summed (large |z|), are evaluated with
    mpmath at extended precision.
    """
    a, b, z = float(a), float(b), float(z)
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 undefined for b = {b!r}")
    if z == 0.0:
        return 0.0, 1.0
    top, w = (b - a, -z) if z < 0.0 else (a, z)
    # the terms grow while (top + k) w / ((b + k)(k + 1)) > 1
    peak = 0.5 * (w - b + math.sqrt((w - b) ** 2 + 4.0 * w * max(top, 0.0)))
    if peak > _TAYLOR_REACH:
        logger.debug("1F1(%g; %g; %g): series peaks near term %.3g, using mpmath", a, b, z, peak)
        return _log_hyp1f1_extended(a, b, z)
    mantissa, log_scale, loss = _hyp1f1_taylor(top, b, w, max_iters)
    if z < 0.0:
        log_scale += z
    if loss > _CANCELLATION_LIMIT:
        logger.debug("1F1(%g; %g; %g) cancels (loss %.3g), using extended precision", a, b, z, loss)
        return _log_hyp1f1_extended(a, b, z)
    if mantissa == 0.0:
        return -math.inf, 0.0
    return math.log(abs(mantissa)) + log_scale, math.copysign(1.0, mantissa)


def hyp1f1(a: float, b: float, z: float, max_iters: int = HYP_MAX_ITERS) -> float:
    """Confluent hypergeometric function 1F1(a; b; z)."""
    log_value, sign = log_hyp1f1(a, b, z, max_iters)
    return sign * _scaled_exp(log_value) if sign else 0.0


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real |z| < 1."""
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_integer(c):
        raise DomainError(f"2F1 undefined for c = {c!r}")
    if not -1.0 < z < 1.0:
        raise DomainError(f"2F1 series requires |z| < 1, got z = {z!r}")
    value = float(special.hyp2f1(a, b, c, z))
    if not math.isfinite(value):
        logger.debug("2F1(%g, %g; %g; %g) not finite in scipy, using extended precision", a, b, c, z)
        with mpmath.workdps(_EXTENDED_DPS):
            value = float(mpmath.re(mpmath.hyp2f1(a, b, c, z)))
    if not math.isfinite(value):
        raise ConvergenceError(f"2F1({a}, {b}; {c}; {z}) overflowed")
    return value


# ---------------------------------------------------------------------------
# Meijer G
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeijerGSpec:
    """Parameters of G^{m,n}_{p,q}(x | a_params; b_params).

    The first n entries of a_params feed Gamma(1 - a_j + s) and the first m
    entries of b_params feed Gamma(b_j - s) in the Mellin-Barnes integrand.
    """

    m: int
    n: int
    a_params: Tuple[float, ...]
    b_params: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a_params", tuple(float(v) for v in self.a_params))
        object.__setattr__(self, "b_params", tuple(float(v) for v in self.b_params))
        if not 0 <= self.n <= self.p or not 0 <= self.m <= self.q:
            raise DomainError(
                f"invalid G orders m={self.m}, n={self.n} for p={self.p}, q={self.q}"
            )
        for ai in self.a_params[: self.n]:
            for bj in self.b_params[: self.m]:
                gap = ai - bj
                if gap > 0.5 and abs(gap - round(gap)) < _DEFINABILITY_TOL:
                    raise DomainError(
                        f"G function undefined: a={ai} and b={bj} differ by a positive integer"
                    )

    @property
    def p(self) -> int:
        return len(self.a_params)

    @property
    def q(self) -> int:
        return len(self.b_params)

    def inverted(self) -> "MeijerGSpec":
        """Spec of G^{n,m}_{q,p}(1/x | 1 - b; 1 - a), equal to this one at x."""
        return MeijerGSpec(
            m=self.n,
            n=self.m,
            a_params=tuple(1.0 - v for v in self.b_params),
            b_params=tuple(1.0 - v for v in self.a_params),
        )


def _log_argument(x: Optional[float], log_x: Optional[float]) -> float:
    if (x is None) == (log_x is None):
        raise DomainError("pass exactly one of x or log_x")
    if log_x is not None:
        log_x = float(log_x)
        if not math.isfinite(log_x):
            raise DomainError(f"log_x must be finite, got {log_x!r}")
        return log_x
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"G argument must be a positive real, got {x!r}")
    return math.log(x)


def _gamma_factor(arg, numerator, log_mag, sign, vanish):
    pole = (arg <= 0.0) & (arg == np.floor(arg))
    if numerator:
        if np.any(pole):
            raise DomainError("coalescing poles reached a residue numerator")
        return log_mag + special.gammaln(arg), sign * special.gammasgn(arg), vanish
    safe = np.where(pole, 1.0, arg)
    return log_mag - special.gammaln(safe), sign * special.gammasgn(safe), vanish | pole


def _residue_terms(m: int, n: int, a: np.ndarray, b: np.ndarray, h: int, k: np.ndarray, log_x: float) -> np.ndarray:
    """Residues of the integrand at s = b_h + k, k in the given index block."""
    bh = b[h]
    log_mag = (bh + k) * log_x - special.gammaln(k + 1.0)
    sign = np.where(np.mod(k, 2.0) == 0.0, 1.0, -1.0)
    vanish = np.zeros(k.shape, dtype=bool)
    for j in range(b.size):
        if j == h:
            continue
        if j < m:
            log_mag, sign, vanish = _gamma_factor(b[j] - bh - k, True, log_mag, sign, vanish)
        else:
            log_mag, sign, vanish = _gamma_factor(1.0 - b[j] + bh + k, False, log_mag, sign, vanish)
    for j in range(a.size):
        if j < n:
            log_mag, sign, vanish = _gamma_factor(1.0 - a[j] + bh + k, True, log_mag, sign, vanish)
        else:
            log_mag, sign, vanish = _gamma_factor(a[j] - bh - k, False, log_mag, sign, vanish)
    live = np.where(vanish, -np.inf, log_mag)
    if np.any(live > _LOG_MAX):
        raise ConvergenceError("residue terms overflow the double range")
    with np.errstate(under="ignore"):
        return np.where(vanish, 0.0, sign * np.exp(np.where(vanish, 0.0, log_mag)))


def _vanishing_guard(m: int, b: np.ndarray, bh: float) -> int:
    """First index from which 1/Gamma(1 - b_j + b_h + k), j > m, stops vanishing."""
    guard = 0
    for bj in b[m:]:
        gap = bj - bh
        if gap > 0.5 and abs(gap - round(gap)) < 1e-12:
            guard = max(guard, int(round(gap)))
    return guard


def _residue_series(
    m: int,
    n: int,
    a: np.ndarray,
    b: np.ndarray,
    log_x: float,
    depths: Optional[np.ndarray] = None,
) -> Tuple[float, float]:
    """Sum residues over the m right pole families.

    With depths given, family h contributes its first depths[h] + 1 terms
    only. Returns (value, conditioning) where conditioning is the largest
    term magnitude over |value|.
    """
    total = 0.0
    peak = 0.0
    for h in range(m):
        limit = G_SERIES_MAX_TERMS if depths is None else int(depths[h]) + 1
        guard = _vanishing_guard(m, b, b[h])
        family = 0.0
        run = 0
        start = 0
        finished = depths is not None
        while start < limit:
            k = np.arange(start, min(start + _CHUNK, limit), dtype=float)
            terms = _residue_terms(m, n, a, b, h, k, log_x)
            peak = max(peak, float(np.max(np.abs(terms))))
            partial = family + np.cumsum(terms)
            if depths is None:
                for idx in range(k.size):
                    negligible = abs(terms[idx]) <= G_SERIES_RTOL * abs(partial[idx])
                    run = run + 1 if negligible and k[idx] >= guard else 0
                    if run >= G_SERIES_PATIENCE:
                        family = float(partial[idx])
                        finished = True
                        break
                if finished:
                    break
            family = float(partial[-1])
            start += k.size
        if not finished:
            raise ConvergenceError(
                f"residue family {h} did not settle within {limit} terms",
                partial_value=total + family,
                iterations=limit,
            )
        total += family
    if peak == 0.0:
        return 0.0, 1.0
    conditioning = peak / abs(total) if total != 0.0 else math.inf
    return total, conditioning


def _coalescing_groups(values: Sequence[float]) -> List[List[int]]:
    """Indices of values whose pairwise differences are (nearly) integers."""
    groups: List[List[int]] = []
    for i, value in enumerate(values):
        for group in groups:
            gap = value - values[group[0]]
            if abs(gap - round(gap)) < _COALESCE_TOL:
                group.append(i)
                break
        else:
            groups.append([i])
    return [g for g in groups if len(g) > 1]


def _partner_depths(values: Sequence[float], groups: List[List[int]]) -> np.ndarray:
    depths = np.zeros(len(values), dtype=int)
    for group in groups:
        for h in group:
            for j in group:
                gap = int(round(values[j] - values[h]))
                depths[h] = max(depths[h], gap)
    return depths


def _series_value(spec: MeijerGSpec, log_x: float, leading: bool = False) -> Tuple[float, float]:
    """Residue sum with coalescing families resolved by perturbation.

    Coalescing members are offset by rank * t * delta for t in {+-1, +-2}; the
    +- pairs cancel the odd orders and (4 A(1) - A(2)) / 3 removes delta^2.
    """
    m, n = spec.m, spec.n
    a = np.asarray(spec.a_params, dtype=float)
    b = np.asarray(spec.b_params, dtype=float)
    groups = _coalescing_groups(b[:m])
    depths = _partner_depths(b[:m], groups) if leading else None
    if not groups:
        return _residue_series(m, n, a, b, log_x, depths)

    order = max(len(g) for g in groups)
    delta = _EPS ** (1.0 / (order + 3))
    offsets = np.zeros_like(b)
    for group in groups:
        for rank, j in enumerate(group):
            offsets[j] = rank
    logger.debug("coalescing b-families %s, perturbation delta=%.3g", groups, delta)

    averages = []
    conditioning = 0.0
    for t in (1.0, 2.0):
        pair = []
        for sign in (1.0, -1.0):
            value, cond = _residue_series(m, n, a, b + sign * t * delta * offsets, log_x, depths)
            pair.append(value)
            conditioning = max(conditioning, cond)
        averages.append(0.5 * (pair[0] + pair[1]))
    return (4.0 * averages[0] - averages[1]) / 3.0, conditioning


def _series_plan(spec: MeijerGSpec, log_x: float) -> Optional[Tuple[MeijerGSpec, float]]:
    """Pick the convergent residue expansion, or None when only the contour will do."""
    if spec.p < spec.q or (spec.p == spec.q and log_x < -_UNIT_BAND):
        target, lx = spec, log_x
    elif spec.p > spec.q or (spec.p == spec.q and log_x > _UNIT_BAND):
        target, lx = spec.inverted(), -log_x
    else:
        return None
    gap = target.q - target.p
    if gap > 0 and gap * math.exp(min(lx / gap, 50.0)) > math.log(G_CONDITIONING_LIMIT):
        # terms peak near k ~ x^(1/gap) at roughly exp(gap * x^(1/gap)) times the result
        return None
    return target, lx


def meijer_g(spec: MeijerGSpec, x: Optional[float] = None, *, log_x: Optional[float] = None) -> float:
    """Meijer G function G^{m,n}_{p,q}(x | a; b) for real x > 0.

    Args:
        spec: parameter specification.
        x: the argument; alternatively pass ``log_x`` to avoid forming it.

    Returns:
        The function value. The residue series is used where it converges and
        is well conditioned; contour quadrature covers the rest.
    """
    return _meijer_g_cached(spec, _log_argument(x, log_x))


@functools.lru_cache(maxsize=16384)
def _meijer_g_cached(spec: MeijerGSpec, log_x: float) -> float:
    plan = _series_plan(spec, log_x)
    if plan is not None:
        target, lx = plan
        try:
            value, conditioning = _series_value(target, lx)
        except ConvergenceError as exc:
            logger.debug("residue series abandoned (%s), switching to contour", exc)
        else:
            if conditioning <= G_CONDITIONING_LIMIT:
                return value
            logger.debug(
                "residue series ill-conditioned (%.3g) at ln x=%.4g, switching to contour",
                conditioning,
                log_x,
            )
    return meijer_g_contour(spec, log_x=log_x)


def meijer_g_asymptotic(spec: MeijerGSpec, x: Optional[float] = None, *, log_x: Optional[float] = None) -> float:
    """Leading large-x behaviour: one residue per left pole family, j <= n.

    Each family contributes Prod Gamma ratios * x^(a_j - 1). Families whose
    poles coincide also bring the partner residues sharing that pole.
    """
    lx = _log_argument(x, log_x)
    if spec.n == 0:
        raise DomainError("no left pole families: the G function decays beyond all powers")
    value, _ = _series_value(spec.inverted(), -lx, leading=True)
    return value


class _MellinKernel:
    """ln of the Mellin-Barnes integrand ratio of gamma products."""

    def __init__(self, spec: MeijerGSpec) -> None:
        a = np.asarray(spec.a_params, dtype=float)
        b = np.asarray(spec.b_params, dtype=float)
        self.b_left = b[: spec.m]
        self.a_left = a[: spec.n]
        self.b_right = b[spec.m:]
        self.a_right = a[spec.n:]

    def log(self, s: complex) -> complex:
        return complex(
            np.sum(special.loggamma(self.b_left - s))
            + np.sum(special.loggamma(1.0 - self.a_left + s))
            - np.sum(special.loggamma(1.0 - self.b_right + s))
            - np.sum(special.loggamma(self.a_right - s))
        )

    def real_log(self, c: float) -> float:
        upper = np.concatenate([self.b_left - c, 1.0 - self.a_left + c])
        if np.any((upper <= 0.0) & (upper == np.floor(upper))):
            return math.inf
        lower = np.concatenate([1.0 - self.b_right + c, self.a_right - c])
        return float(np.sum(special.gammaln(upper)) - np.sum(special.gammaln(lower)))


def _saddle_abscissa(kernel: _MellinKernel, log_x: float, lo: float, hi: float, gap: int) -> float:
    span = 40.0 + 4.0 * math.exp(min(abs(log_x) / max(gap, 1), 8.0))
    if math.isfinite(hi):
        bounds = (hi - span, hi - 1e-3)
    elif math.isfinite(lo):
        bounds = (lo + 1e-3, lo + span)
    else:
        bounds = (-0.5 * span, 0.5 * span)

    def objective(c: float) -> float:
        off_axis = kernel.log(complex(c, 0.5)).real
        return max(off_axis, kernel.real_log(c)) + c * log_x

    result = optimize.minimize_scalar(objective, bounds=bounds, method="bounded", options={"xatol": 1e-4})
    return float(result.x)


def meijer_g_contour(
    spec: MeijerGSpec,
    x: Optional[float] = None,
    *,
    log_x: Optional[float] = None,
    rtol: float = CONTOUR_RTOL,
) -> float:
    """Meijer G by quadrature along the vertical line Re s = c.

    G = (1/pi) * Int_0^inf Re[Phi(c + i t) x^(c + i t)] dt, with c separating
    the pole families: midway between them when both exist, at the real-axis
    saddle of the integrand otherwise. Requires m + n > (p + q) / 2.
    """
    lx = _log_argument(x, log_x)
    m, n, p, q = spec.m, spec.n, spec.p, spec.q
    decay = m + n - 0.5 * (p + q)
    if decay <= 0.0:
        raise DomainError(
            f"G^{{{m},{n}}}_{{{p},{q}}}: Mellin-Barnes integrand does not decay (m + n <= (p + q)/2)"
        )
    lo = max(spec.a_params[:n]) - 1.0 if n else -math.inf
    hi = min(spec.b_params[:m]) if m else math.inf
    if not lo < hi:
        raise DomainError("no vertical contour separates the pole families")

    kernel = _MellinKernel(spec)
    if math.isfinite(lo) and math.isfinite(hi):
        c = 0.5 * (lo + hi)
    else:
        c = _saddle_abscissa(kernel, lx, lo, hi, q - p)

    def log_magnitude(t: float) -> float:
        return kernel.log(complex(c, t)).real + c * lx

    cutoff = math.log(CONTOUR_CUTOFF)
    t_max = 4.0
    while True:
        reference = max(log_magnitude(t) for t in np.linspace(0.0, t_max, 65))
        if log_magnitude(t_max) - reference < cutoff:
            break
        if t_max > 1e4:
            raise ConvergenceError("contour integrand does not fall off", iterations=int(t_max))
        t_max *= 2.0

    def integrand(t: float) -> float:
        s = complex(c, t)
        z = kernel.log(s) + s * lx - reference
        return math.exp(min(z.real, _LOG_MAX)) * math.cos(z.imag)

    width = 4.0 * math.pi / (abs(lx) + (p + q) * math.log(2.0 + t_max) + 1.0)
    pieces = min(400, max(1, math.ceil(t_max / width)))
    edges = np.linspace(0.0, t_max, pieces + 1)
    total = 0.0
    error = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        value, abserr = integrate.quad(integrand, left, right, epsabs=1e-16, epsrel=rtol, limit=200)
        total += value
        error += abserr
    log_scale = reference - math.log(math.pi)
    value = total * _scaled_exp(log_scale)
    # far tails: the absolute error is below anything a double can hold
    if error > 1e-6 * abs(total) + 1e-13 and math.log(error) + log_scale > _LOG_NEGLIGIBLE:
        raise ConvergenceError(
            f"contour quadrature error {error:.3g} against value {total:.3g}",
            partial_value=value,
        )
    bound = abs(total) + error
    if bound == 0.0 or math.log(bound) + log_scale <= _LOG_NEGLIGIBLE:
        return 0.0
    return value
