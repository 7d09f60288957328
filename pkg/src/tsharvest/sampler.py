"""Increments of the compensated one-sided tempered stable process.

Jumps of size z >= eps are simulated exactly as a compound Poisson process
(two bands: [eps, band_split] and [band_split, inf)).  Jumps below eps are
replaced by their mean, which cancels that part of the (0, 1] compensator,
and optionally by a Gaussian with the truncated variance (Asmussen-Rosinski).
The resulting increment over dt has

    E[dL] = dt * int_1^inf z nu(dz),   Var[dL] ~= dt * int_0^inf z^2 nu(dz).
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SamplerError
from .levy import DEFAULT_QUAD, band_mass, band_mean, truncated_second_moment

DEFAULT_EPS = 1e-3
DEFAULT_SEED = 20240607
# Gaussian small-jump term is dropped when its variance is below double resolution
GAUSSIAN_MIN_VAR = 1e-18
MAX_REJECTION_ROUNDS = 1_000_000


class SmallJumpMode(str, enum.Enum):
    DRIFT_ONLY = "DriftOnly"
    GAUSSIAN = "GaussianApprox"


class RngStream:
    """Independent, reproducible random stream keyed by ``(seed, stream_id)``.

    ``stream_id`` may be an int or a tuple of ints; it becomes the
    SeedSequence spawn key, so distinct ids give statistically independent
    PCG64 streams.
    """

    def __init__(self, seed=DEFAULT_SEED, stream_id=0):
        key = tuple(stream_id) if isinstance(stream_id, (tuple, list)) else (int(stream_id),)
        self.seed = int(seed)
        self.stream_id = key
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=key))
        )

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class JumpScheme:
    eps: float
    mode: SmallJumpMode
    band_split: float
    nu_mid: float
    nu_tail: float
    drift_correction: float
    small_var: float

    def effective_mode(self, dt):
        if self.mode is SmallJumpMode.GAUSSIAN and self.small_var * dt >= GAUSSIAN_MIN_VAR:
            return SmallJumpMode.GAUSSIAN
        return SmallJumpMode.DRIFT_ONLY


def build_scheme(lp, eps=DEFAULT_EPS, mode=SmallJumpMode.GAUSSIAN, q=DEFAULT_QUAD, band_split=1.0):
    """Precompute band intensities and the compensation drift for truncation level ``eps``."""
    mode = SmallJumpMode(mode)
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if not eps < band_split:
        raise DomainError("eps must be below band_split")
    return JumpScheme(
        eps=eps,
        mode=mode,
        band_split=band_split,
        nu_mid=band_mass(eps, band_split, lp, q),
        nu_tail=band_mass(band_split, math.inf, lp, q),
        # compensator acts on (0, 1]; the (0, eps) part is cancelled by the mean replacement
        drift_correction=-band_mean(eps, 1.0, lp, q),
        small_var=truncated_second_moment(eps, lp, q),
    )


def sample_band_jumps(n, lo, hi, lp, rng):
    """``n`` draws from the density proportional to exp(-lam z) z^(-1-beta) on [lo, hi).

    Truncated-Pareto inverse transform followed by acceptance with
    probability exp(-lam (z - lo)).
    """
    if not 0 < lo < hi:
        raise DomainError("sample_band_jumps needs 0 < lo < hi")
    n = int(n)
    if n <= 0:
        return np.empty(0)
    gen = rng.generator
    beta, lam = lp.beta, lp.lam
    lo_pow = lo ** -beta
    span = lo_pow - (0.0 if math.isinf(hi) else hi ** -beta)
    upper = np.nextafter(hi, lo) if math.isfinite(hi) else math.inf
    out = np.empty(n)
    filled = 0
    accept_rate = 0.5
    for _ in range(MAX_REJECTION_ROUNDS):
        need = n - filled
        m = max(16, int(1.2 * need / accept_rate) + 8)
        u = gen.random(m)
        z = (lo_pow - u * span) ** (-1.0 / beta)
        z = np.minimum(np.maximum(z, lo), upper)
        keep = z[gen.random(m) < np.exp(-lam * (z - lo))]
        accept_rate = max(len(keep) / m, 1e-6)
        take = min(len(keep), need)
        out[filled:filled + take] = keep[:take]
        filled += take
        if filled == n:
            return out
    raise SamplerError(f"rejection sampler exceeded {MAX_REJECTION_ROUNDS} rounds on [{lo}, {hi})")


def sample_band_jump(lo, hi, lp, rng):
    return float(sample_band_jumps(1, lo, hi, lp, rng)[0])


@dataclass
class JumpBatch:
    """Per-step jump noise for ``n`` consecutive steps.

    ``jump_sum[i]`` is the total size of jumps >= eps in step i and
    ``log_jump_sum[i]`` the sum of ln(1 + sigma z) over the same marks.
    ``eta`` holds standard normals for the small-jump Gaussian (None in
    DriftOnly mode).
    """

    jump_sum: np.ndarray
    log_jump_sum: np.ndarray | None
    eta: np.ndarray | None
    n_jumps: int


def sample_jump_batch(n, dt, scheme, lp, rng, sigma=None):
    """Jump noise for ``n`` steps of length ``dt``.

    Uses the fact that i.i.d. Poisson(nu dt) counts over n steps are
    equivalent to a Poisson(nu n dt) total placed uniformly on the steps.
    """
    gen = rng.generator
    jump_sum = np.zeros(n)
    log_sum = np.zeros(n) if sigma is not None else None
    total = 0
    for rate, lo, hi in (
        (scheme.nu_mid, scheme.eps, scheme.band_split),
        (scheme.nu_tail, scheme.band_split, math.inf),
    ):
        k = int(gen.poisson(rate * dt * n))
        if k == 0:
            continue
        where = gen.integers(0, n, size=k)
        z = sample_band_jumps(k, lo, hi, lp, rng)
        jump_sum += np.bincount(where, weights=z, minlength=n)
        if log_sum is not None:
            log_sum += np.bincount(where, weights=np.log1p(sigma * z), minlength=n)
        total += k
    eta = None
    if scheme.effective_mode(dt) is SmallJumpMode.GAUSSIAN:
        eta = gen.standard_normal(n)
    return JumpBatch(jump_sum=jump_sum, log_jump_sum=log_sum, eta=eta, n_jumps=total)


def increments_from_batch(batch, dt, scheme):
    dl = batch.jump_sum + scheme.drift_correction * dt
    if batch.eta is not None:
        dl = dl + math.sqrt(scheme.small_var * dt) * batch.eta
    return dl


def sample_increments(n, dt, scheme, lp, rng):
    """``n`` independent increments dL over steps of length ``dt``."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    return increments_from_batch(sample_jump_batch(int(n), dt, scheme, lp, rng), dt, scheme)


def sample_increment(dt, scheme, lp, rng):
    """A single increment dL over ``dt`` with per-band Poisson jump counts."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    gen = rng.generator
    total = scheme.drift_correction * dt
    for rate, lo, hi in (
        (scheme.nu_mid, scheme.eps, scheme.band_split),
        (scheme.nu_tail, scheme.band_split, math.inf),
    ):
        k = int(gen.poisson(rate * dt)) if rate > 0 else 0
        if k:
            total += float(sample_band_jumps(k, lo, hi, lp, rng).sum())
    if scheme.effective_mode(dt) is SmallJumpMode.GAUSSIAN:
        total += math.sqrt(scheme.small_var * dt) * float(gen.standard_normal())
    return total
