"""Oracle suite behind ``tsharvest validate``.

Each check compares a production routine against an independent reference
(closed forms, a brute-force trapezoid rule, or sampling statistics) and
reports value, reference, tolerance and verdict.
"""

import math

import numpy as np

from .analytics import critical_sigma
from .levy import (
    LevyParams,
    band_mass,
    band_mean,
    phi_integral,
    second_moment,
    sensitivity_integral,
    tail_mean,
    tail_mean_closed_form,
    truncated_second_moment,
)
from .output import ResultTable
from .quadrature import DEFAULT_QUAD
from .sampler import RngStream, SmallJumpMode, build_scheme, sample_band_jumps, sample_increments
from .special import gamma


def phi_integral_trapezoid(sigma, lp, n=1_000_001):
    """Brute-force I(sigma) on u = z/(1+z); independent of the adaptive path.

    The compensator switches off at z = 1 (u = 1/2), so each side is
    integrated separately to keep the trapezoid rule second order.
    """
    total = 0.0
    for lo, hi, comp in ((0.0, 0.5, True), (0.5, 1.0, False)):
        u = np.linspace(lo, hi, n)
        u = u[(u > 0) & (u < 1)]
        z = u / (1.0 - u)
        bracket = np.log1p(sigma * z) - (sigma * z if comp else 0.0)
        f = bracket * np.exp(-lp.lam * z) * z ** (-1.0 - lp.beta) / (1.0 - u) ** 2
        # both endpoints of the full range carry a vanishing integrand
        if lo == 0.0:
            u, f = np.concatenate([[0.0], u]), np.concatenate([[0.0], f])
        if hi == 1.0:
            u, f = np.concatenate([u, [1.0]]), np.concatenate([f, [0.0]])
        total += float(np.trapezoid(f, u))
    return total


def moment_check(n, dt, lp, eps, seed, stream_id=0, q=None):
    """Sample ``n`` increments; return (mean, mean_se, var, var_se, target_mean, target_var)."""
    scheme = build_scheme(lp, eps, SmallJumpMode.GAUSSIAN, q or DEFAULT_QUAD)
    x = sample_increments(n, dt, scheme, lp, RngStream(seed, stream_id))
    m = float(x.mean())
    c = x - m
    v = float(np.mean(c * c))
    m4 = float(np.mean(c ** 4))
    return (m, math.sqrt(v / n), v * n / (n - 1), math.sqrt(max(m4 - v * v, 0.0) / n),
            dt * tail_mean(lp), dt * second_moment(lp))


def run_validation(seed, n_increments=1_000_000, dt=1e-3, eps=1e-3):
    rows = []

    def add(name, value, reference, tol, kind="rel"):
        if kind == "rel":
            err = abs(value - reference) / abs(reference)
        else:
            err = abs(value - reference)
        rows.append([name, value, reference, err, tol, kind, bool(err <= tol)])

    base = LevyParams()
    add("phi_integral(0.005) vs trapezoid", phi_integral(0.005, base),
        phi_integral_trapezoid(0.005, base), 1e-6)
    add("phi_integral(1.0) vs trapezoid", phi_integral(1.0, base), phi_integral_trapezoid(1.0, base), 1e-6)
    for beta in (0.3, 0.7, 1.0, 1.5):
        for lam in (0.5, 1.0, 2.0):
            lp = LevyParams(beta, lam)
            add(f"tail_mean vs incomplete gamma (beta={beta}, lambda={lam})", tail_mean(lp),
                tail_mean_closed_form(lp), 1e-8)
    grid = np.linspace(0.1, 1.9, 5)
    for beta in grid:
        for lam in np.linspace(0.2, 3.8, 5):
            lp = LevyParams(float(beta), float(lam))
            add(f"second_moment quadrature vs closed form (beta={beta:g}, lambda={lam:g})",
                truncated_second_moment(math.inf, lp), second_moment(lp), 1e-8)
    add("band additivity [1e-3,1] + [1,inf)", band_mass(1e-3, 1.0, base) + band_mass(1.0, math.inf, base),
        band_mass(1e-3, math.inf, base), 1e-9)
    near_pareto = LevyParams(0.7, 1e-8)
    add("band_mean(0,1) at lambda -> 0", band_mean(0.0, 1.0, near_pareto), 1.0 / (1.0 - 0.7), 1e-6)

    s0 = critical_sigma(base)
    add("sensitivity_integral(critical_sigma)", sensitivity_integral(s0, base), 0.0, 1e-8, "abs")

    rng = RngStream(seed, 9001)
    z = sample_band_jumps(100_000, 1.0, math.inf, base, rng)
    mean_ref = band_mean(1.0, math.inf, base) / band_mass(1.0, math.inf, base)
    se = float(z.std(ddof=1) / math.sqrt(z.size))
    add("tail jump mean (3 SE)", float(z.mean()), mean_ref, 3 * se, "abs")
    w = sample_band_jumps(100_000, 1e-3, 1.0, base, RngStream(seed, 9002))
    ref = band_mean(1e-3, 1.0, base) / band_mass(1e-3, 1.0, base)
    add("mid-band jump mean (3 SE)", float(w.mean()), ref,
        3 * float(w.std(ddof=1) / math.sqrt(w.size)), "abs")

    m, m_se, v, v_se, tm, tv = moment_check(n_increments, dt, base, eps, seed, 9003)
    add("increment mean (4 SE)", m, tm, 4 * m_se, "abs")
    add("increment variance (4 SE)", v, tv, 4 * v_se, "abs")
    add("gamma(0.5)^2 = pi", gamma(0.5) ** 2, math.pi, 1e-14)

    return ResultTable(["check", "value", "reference", "error", "tolerance", "kind", "passed"], rows,
                       meta={"n_checks": len(rows), "n_failed": sum(not r[-1] for r in rows)})
