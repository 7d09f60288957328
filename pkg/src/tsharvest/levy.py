"""Integrals against the one-sided tempered stable Levy measure.

    nu(dz) = exp(-lam z) z^(-1-beta) dz,   z > 0.

Every integral is split into regimes: a neighbourhood of zero where the
integrand behaves like ``z^(s-1)`` (treated by a power substitution), the
compensation kink at z = 1, a bulk interval up to the tempering scale
``max(1, 10/lam)``, and an exponentially damped semi-infinite tail.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import special
from .errors import DomainError
from .quadrature import DEFAULT_QUAD, integrate, integrate_power_singular

BETA_GUARD = 1e-3
SERIES_TERMS = 8
# the 8-term log series is used only while sigma*z stays below this
_SERIES_MAX_ARG = 1e-2


@dataclass(frozen=True)
class LevyParams:
    """Shape of the jump measure: stability index ``beta`` and tempering rate ``lam``."""

    beta: float = 0.7
    lam: float = 1.0

    def __post_init__(self):
        if not (BETA_GUARD <= self.beta <= 2.0 - BETA_GUARD):
            raise DomainError(f"beta must lie in [{BETA_GUARD}, {2 - BETA_GUARD}], got {self.beta}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise DomainError(f"lam must be positive and finite, got {self.lam}")


def tempering_point(lp):
    return max(1.0, 10.0 / lp.lam)


def _check_sigma(sigma, allow_zero=True):
    if not math.isfinite(sigma) or sigma < 0 or (sigma == 0 and not allow_zero):
        raise DomainError(f"sigma must be a finite non-negative number, got {sigma}")


def _smooth_part(f, lo, hi, lp, q):
    """Integrate a smooth integrand over [lo, hi] with lo >= 1 implied splits at the tempering point."""
    if hi <= lo:
        return 0.0
    total = 0.0
    t = tempering_point(lp)
    if lo < t:
        total += integrate(f, lo, min(hi, t), q)[0]
    if hi > t:
        total += integrate(f, max(lo, t), hi, q)[0]
    return total


def _measure_integral(f, lo, hi, lp, q, near_zero=None):
    """int_lo^hi f(z) dz, splitting at z = 1 and the tempering point.

    ``near_zero=(g, s)`` supplies the representation f(z) = z^(s-1) g(z) used
    when lo == 0.
    """
    if hi < lo:
        raise DomainError("integration bounds must satisfy lo <= hi")
    if hi == lo:
        return 0.0
    total = 0.0
    if lo < 1.0:
        top = min(hi, 1.0)
        if lo == 0.0:
            g, s = near_zero
            total += integrate_power_singular(g, s, top, q)[0]
        else:
            total += integrate(f, lo, top, q)[0]
    if hi > 1.0:
        total += _smooth_part(f, max(lo, 1.0), hi, lp, q)
    return total


def _log_series_ratio(w):
    """(log(1+w) - w) / w^2 for small w via the alternating series."""
    acc = np.zeros_like(w)
    for k in range(SERIES_TERMS + 1, 1, -1):
        acc = acc * w + (-1.0) ** (k + 1) / k
    return acc


def _compensated_log(sigma, lo, hi, lp, q):
    """int_lo^hi [ln(1+sigma z) - sigma z 1{z<=1}] nu(dz) with 0 <= lo."""
    beta, lam = lp.beta, lp.lam
    if sigma == 0 or hi <= lo:
        return 0.0

    def f_small(z):
        return (np.log1p(sigma * z) - sigma * z) * z ** (-1.0 - beta) * np.exp(-lam * z)

    def f_large(z):
        return np.log1p(sigma * z) * z ** (-1.0 - beta) * np.exp(-lam * z)

    def g_series(z):
        # z^(1-beta) * g(z) equals the small-z integrand
        return sigma * sigma * _log_series_ratio(sigma * z) * np.exp(-lam * z)

    total = 0.0
    if lo < 1.0:
        top = min(hi, 1.0)
        start = lo
        if lo == 0.0:
            cut = min(q.cutoff_for(sigma), _SERIES_MAX_ARG / sigma, top)
            total += integrate_power_singular(g_series, 2.0 - beta, cut, q)[0]
            start = cut
        if top > start:
            total += integrate(f_small, start, top, q)[0]
    if hi > 1.0:
        total += _smooth_part(f_large, max(lo, 1.0), hi, lp, q)
    return total


def phi_integral(sigma, lp, q=DEFAULT_QUAD):
    """I(sigma) = int_0^inf [ln(1+sigma z) - sigma z 1{0<z<=1}] nu(dz).

    The jump contribution to the persistence threshold.  For z below the
    series cutoff the bracket is summed as ``-w^2/2 + w^3/3 - ...`` (w = sigma z)
    to avoid cancellation against the ``z^(-1-beta)`` singularity.
    """
    _check_sigma(sigma)
    if sigma == 0:
        return 0.0
    return _compensated_log(sigma, 0.0, math.inf, lp, q)


def sensitivity_integral(sigma, lp, q=DEFAULT_QUAD):
    """I'(sigma) = int_0^inf [1/(1+sigma z) - 1{0<z<=1}] e^(-lam z) z^(-beta) dz."""
    _check_sigma(sigma)
    beta, lam = lp.beta, lp.lam

    def g_near(z):
        # on (0,1]: 1/(1+sz) - 1 = -s z/(1+sz)  ->  z^(1-beta) * g(z)
        return -sigma * np.exp(-lam * z) / (1.0 + sigma * z)

    def f_tail(z):
        return z ** (-beta) * np.exp(-lam * z) / (1.0 + sigma * z)

    head = 0.0
    if sigma > 0:
        head = integrate_power_singular(g_near, 2.0 - beta, 1.0, q)[0]
    return head + _smooth_part(f_tail, 1.0, math.inf, lp, q)


def tail_mean(lp, q=DEFAULT_QUAD):
    """int_1^inf z nu(dz): the drift of L(t) in its compensated form."""
    return band_mean(1.0, math.inf, lp, q)


def tail_mean_closed_form(lp):
    """lam^(beta-1) * Gamma(1-beta, lam)."""
    if lp.beta == 1.0:
        return special.exp1(lp.lam)
    return lp.lam ** (lp.beta - 1.0) * special.upper_gamma(1.0 - lp.beta, lp.lam)


def second_moment(lp):
    """int_0^inf z^2 nu(dz) = lam^(beta-2) Gamma(2-beta)."""
    return lp.lam ** (lp.beta - 2.0) * special.gamma(2.0 - lp.beta)


def truncated_second_moment(eps, lp, q=DEFAULT_QUAD):
    """int_0^eps z^2 nu(dz); ``eps`` may be ``inf``."""
    if eps < 0 or math.isnan(eps):
        raise DomainError("eps must be non-negative")
    if eps == 0:
        return 0.0
    beta, lam = lp.beta, lp.lam

    def f(z):
        return z ** (1.0 - beta) * np.exp(-lam * z)

    def g(z):
        return np.exp(-lam * z)

    return _measure_integral(f, 0.0, eps, lp, q, near_zero=(g, 2.0 - beta))


def band_mass(lo, hi, lp, q=DEFAULT_QUAD):
    """nu([lo, hi]) for 0 < lo <= hi <= inf."""
    if lo <= 0:
        raise DomainError("band_mass needs lo > 0: the measure has infinite mass near zero")
    if hi < lo:
        raise DomainError("band_mass needs lo <= hi")
    beta, lam = lp.beta, lp.lam

    def f(z):
        return z ** (-1.0 - beta) * np.exp(-lam * z)

    return _measure_integral(f, lo, hi, lp, q)


def band_mean(lo, hi, lp, q=DEFAULT_QUAD):
    """int_lo^hi z nu(dz); lo = 0 only when beta < 1."""
    if lo < 0 or hi < lo:
        raise DomainError("band_mean needs 0 <= lo <= hi")
    beta, lam = lp.beta, lp.lam
    if lo == 0 and beta >= 1:
        raise DomainError("int_0 z nu(dz) diverges for beta >= 1")

    def f(z):
        return z ** (-beta) * np.exp(-lam * z)

    def g(z):
        return np.exp(-lam * z)

    return _measure_integral(f, lo, hi, lp, q, near_zero=(g, 1.0 - beta))


def log_moment2(sigma, lp, q=DEFAULT_QUAD):
    """int_0^inf ln(1+sigma z)^2 nu(dz)."""
    _check_sigma(sigma)
    if sigma == 0:
        return 0.0
    return log_moment2_band(sigma, 0.0, math.inf, lp, q)


def log_moment2_band(sigma, lo, hi, lp, q=DEFAULT_QUAD):
    beta, lam = lp.beta, lp.lam

    def f(z):
        return np.log1p(sigma * z) ** 2 * z ** (-1.0 - beta) * np.exp(-lam * z)

    def g(z):
        r = np.log1p(sigma * z) / z
        return r * r * np.exp(-lam * z)

    return _measure_integral(f, lo, hi, lp, q, near_zero=(g, 2.0 - beta))


def compensated_log_band(sigma, lo, hi, lp, q=DEFAULT_QUAD):
    """int_lo^hi [ln(1+sigma z) - sigma z 1{z<=1}] nu(dz); phi_integral is the full range."""
    _check_sigma(sigma)
    return _compensated_log(sigma, lo, hi, lp, q)
