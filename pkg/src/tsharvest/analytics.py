"""Closed-form analysis of the harvested stochastic logistic model.

    dx = x (a - h - b x) dt + tau x dB + sigma x(t-) dL

Threshold ``Phi = A - h`` with ``A = a - tau2/2 + I(sigma)``; the sign of Phi
separates extinction, non-persistence and persistence in time average with
limit ``Phi / b``.  Yield ``Y(h) = h (A - h) / b`` peaks at ``h* = A/2``.
"""

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import BracketError, DomainError, NoPolicyError, RegimeError
from .levy import LevyParams, phi_integral, sensitivity_integral
from .quadrature import DEFAULT_QUAD

DEFAULT_CLASSIFY_TOL = 1e-9
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class ModelParams:
    a: float = 1.5
    b: float = 0.1
    h: float = 0.75
    tau2: float = 0.01
    sigma: float = 0.005
    levy: LevyParams = field(default_factory=LevyParams)

    def __post_init__(self):
        for name in ("a", "b", "h", "tau2", "sigma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
        if self.a <= 0 or self.b <= 0:
            raise DomainError("a and b must be positive")
        if self.h < 0 or self.tau2 < 0 or self.sigma < 0:
            raise DomainError("h, tau2 and sigma must be non-negative")

    @property
    def tau(self):
        return math.sqrt(self.tau2)

    def with_(self, **changes):
        """Copy with fields replaced; ``beta``/``lam`` reach into ``levy``."""
        levy_changes = {k: changes.pop(k) for k in ("beta", "lam") if k in changes}
        if levy_changes:
            changes["levy"] = replace(self.levy, **levy_changes)
        return replace(self, **changes)


class RegimeTag(str, enum.Enum):
    EXTINCTION = "Extinction"
    NON_PERSISTENT = "NonPersistent"
    PERSISTENT = "Persistent"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    phi: float


@dataclass(frozen=True)
class OptimalPolicy:
    A: float
    h_star: float
    y_star: float


@dataclass(frozen=True)
class Sensitivities:
    dh_dtau2: float
    dY_dtau2: float
    dh_dsigma: float
    dY_dsigma: float


def capacity_A(p, q=DEFAULT_QUAD):
    """A = a - tau2/2 + I(sigma); independent of h and b."""
    return p.a - 0.5 * p.tau2 + phi_integral(p.sigma, p.levy, q)


def threshold_phi(p, q=DEFAULT_QUAD):
    return capacity_A(p, q) - p.h


def classify(p, q=DEFAULT_QUAD, tol=DEFAULT_CLASSIFY_TOL):
    if tol < 0:
        raise DomainError("tol must be non-negative")
    phi = threshold_phi(p, q)
    if phi < -tol:
        tag = RegimeTag.EXTINCTION
    elif phi > tol:
        tag = RegimeTag.PERSISTENT
    else:
        tag = RegimeTag.NON_PERSISTENT
    return Regime(tag, phi)


def mean_population(p, q=DEFAULT_QUAD):
    """Almost-sure time-average limit Phi / b (persistent regime only)."""
    phi = threshold_phi(p, q)
    if phi <= 0:
        raise RegimeError(f"no positive stationary mean: Phi = {phi:.6g} <= 0")
    return phi / p.b


def yield_from_capacity(h, A, b):
    if h <= 0 or h >= A:
        return 0.0
    return h * (A - h) / b


def expected_yield(p, q=DEFAULT_QUAD):
    """Y(h) = h (A - h) / b on (0, A); zero yield otherwise."""
    return yield_from_capacity(p.h, capacity_A(p, q), p.b)


def policy_from_capacity(A, b):
    if A <= 0:
        raise NoPolicyError(f"no optimal harvesting policy: A = {A:.6g} <= 0")
    return OptimalPolicy(A=A, h_star=0.5 * A, y_star=A * A / (4.0 * b))


def optimal_policy(p, q=DEFAULT_QUAD):
    return policy_from_capacity(capacity_A(p, q), p.b)


def critical_sigma(lp, q=DEFAULT_QUAD, bracket_hint=1.0):
    """Unique root sigma0 of I'(sigma), by geometric bracketing then bisection.

    I'(0) > 0 and I' is strictly decreasing, so one sign change exists.
    """
    if not bracket_hint > 0:
        raise DomainError("bracket_hint must be positive")

    def f(s):
        return sensitivity_integral(s, lp, q)

    lo = hi = float(bracket_hint)
    f_hint = f(lo)
    if f_hint == 0:
        return lo
    if f_hint > 0:
        for _ in range(MAX_DOUBLINGS):
            hi *= 2.0
            if f(hi) < 0:
                break
        else:
            raise BracketError(f"I'(sigma) stayed positive up to sigma = {hi:.3g}")
        lo = hi / 2.0
    else:
        for _ in range(MAX_DOUBLINGS):
            lo /= 2.0
            if f(lo) > 0:
                break
        else:
            raise BracketError(f"I'(sigma) stayed negative down to sigma = {lo:.3g}")
        hi = lo * 2.0

    while hi - lo > 4.0 * math.ulp(hi):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sensitivities(p, q=DEFAULT_QUAD):
    policy = optimal_policy(p, q)
    dh_dsigma = 0.5 * sensitivity_integral(p.sigma, p.levy, q)
    return Sensitivities(
        dh_dtau2=-0.25,
        dY_dtau2=-policy.h_star / (4.0 * p.b),
        dh_dsigma=dh_dsigma,
        dY_dsigma=2.0 * policy.h_star / p.b * dh_dsigma,
    )
