"""Reproduction runs: threshold/effort table, yield curve, noise sweeps, (beta, lambda) heatmaps,
sample paths and the distributional-stability check.

Each ``run_*`` returns a ``ResultTable``; ``figures_for`` renders its plots.
"""

import itertools
import math

import numpy as np

from . import svg
from .analytics import (
    RegimeTag,
    capacity_A,
    classify,
    critical_sigma,
    policy_from_capacity,
    sensitivity_integral,
    yield_from_capacity,
)
from .config import parse_grid, parse_list
from .engine import (
    Scheme,
    parallel_map,
    simulate_coupled_ensemble,
    simulate_ensemble,
    simulate_path,
)
from .errors import NoPolicyError, NumericalError
from .output import ResultTable
from .stats import coupling_decay, pooled_stderr, summarize_ensemble, wasserstein1

H_STAR_MATCH = 5e-3
# parameter domain shown on the heatmaps
BETA_DOMAIN = (0.0, 2.0)
LAMBDA_DOMAIN = (0.0, 4.0)


def _policy_or_none(A, b):
    try:
        return policy_from_capacity(A, b)
    except NoPolicyError:
        return None


def run_table1(cfg, threads=1):
    p, q, sim = cfg.model, cfg.quad, cfg.sim
    A = capacity_A(p, q)
    policy = _policy_or_none(A, p.b)
    rows = []
    for h in parse_list(cfg.experiment.table1_h):
        ph = p.with_(h=h)
        regime = classify(ph, q)
        if policy is None:
            relation = ""
        elif abs(h - policy.h_star) <= H_STAR_MATCH:
            relation = "="
        else:
            relation = "<" if h < policy.h_star else ">"
        paths = simulate_ensemble(ph, sim, cfg.experiment.n_paths, threads, q)
        s = summarize_ensemble(paths, ph, sim.burn_in)
        rows.append([
            h, relation, regime.phi, regime.tag.value,
            regime.phi / p.b if regime.tag is RegimeTag.PERSISTENT else None,
            s.time_avg_mean, s.time_avg_stderr, s.yield_mean,
            yield_from_capacity(h, A, p.b), s.extinction_fraction, s.moment2_mean,
            max(r.terminal_x for r in paths), s.n_paths,
        ])
    columns = ["h", "vs_h_star", "phi", "regime", "mean_theory", "time_avg", "time_avg_stderr",
               "yield_sim", "yield_theory", "extinction_fraction", "moment2", "max_terminal_x", "n_paths"]
    units = {"h": "1/time", "phi": "1/time", "mean_theory": "population", "time_avg": "population",
             "time_avg_stderr": "population", "yield_sim": "population/time",
             "yield_theory": "population/time", "moment2": "population^2",
             "max_terminal_x": "population"}
    meta = {"A": A, "h_star": policy.h_star if policy else None, "y_star": policy.y_star if policy else None}
    return ResultTable(columns, rows, units, meta)


def run_yield_curve(cfg, h_max=None, n_points=None, threads=1):
    """Analytic Y(h) on [0, h_max] with the optimum and (optionally) simulated points."""
    p, q = cfg.model, cfg.quad
    h_max = cfg.experiment.h_max if h_max is None else h_max
    n_points = cfg.experiment.n_points if n_points is None else n_points
    if not h_max > 0 or n_points < 2:
        raise ValueError("yield curve needs h_max > 0 and at least two points")
    A = capacity_A(p, q)
    policy = policy_from_capacity(A, p.b)
    hs = np.linspace(0.0, h_max, n_points)
    rows = [[float(h), yield_from_capacity(float(h), A, p.b)] for h in hs]
    table = ResultTable(["h", "yield"], rows, {"h": "1/time", "yield": "population/time"},
                        {"A": A, "h_star": policy.h_star, "y_star": policy.y_star})
    table.extras["optimum"] = ResultTable(["h_star", "y_star"], [[policy.h_star, policy.y_star]])
    if cfg.experiment.yield_scatter:
        scatter = []
        for h in parse_list(cfg.experiment.table1_h):
            ph = p.with_(h=h)
            s = summarize_ensemble(simulate_ensemble(ph, cfg.sim, cfg.experiment.n_paths, threads, q),
                                   ph, cfg.sim.burn_in)
            scatter.append([h, s.yield_mean, h * s.time_avg_stderr])
        table.extras["scatter"] = ResultTable(["h", "yield_sim", "yield_stderr"], scatter)
    return table


def run_sweep_tau2(cfg):
    p, q = cfg.model, cfg.quad
    base_jump = capacity_A(p.with_(tau2=0.0), q)
    rows = []
    for tau2 in parse_grid(cfg.experiment.tau2_grid):
        A = base_jump - 0.5 * float(tau2)
        pol = _policy_or_none(A, p.b)
        rows.append([float(tau2), A, pol.h_star if pol else None, pol.y_star if pol else None,
                     -0.25, -pol.h_star / (4 * p.b) if pol else None])
    return ResultTable(["tau2", "A", "h_star", "y_star", "dh_dtau2", "dY_dtau2"], rows,
                       {"tau2": "1/time", "A": "1/time", "h_star": "1/time", "y_star": "population/time"},
                       {"sigma": p.sigma})


def run_sweep_sigma(cfg):
    p, q = cfg.model, cfg.quad
    sigma0 = critical_sigma(p.levy, q)
    rows = []
    for sigma in parse_grid(cfg.experiment.sigma_grid):
        ps = p.with_(sigma=float(sigma))
        A = capacity_A(ps, q)
        pol = _policy_or_none(A, p.b)
        dh = 0.5 * sensitivity_integral(float(sigma), p.levy, q)
        rows.append([float(sigma), A, pol.h_star if pol else None, pol.y_star if pol else None, dh,
                     2 * pol.h_star / p.b * dh if pol else None])
    pol0 = _policy_or_none(capacity_A(p.with_(sigma=sigma0), q), p.b)
    meta = {"tau2": p.tau2, "sigma0": sigma0,
            "h_star_at_sigma0": pol0.h_star if pol0 else None,
            "y_star_at_sigma0": pol0.y_star if pol0 else None}
    return ResultTable(["sigma", "A", "h_star", "y_star", "dh_dsigma", "dY_dsigma"], rows,
                       {"sigma": "dimensionless", "A": "1/time", "h_star": "1/time",
                        "y_star": "population/time"}, meta)


def run_noise_sweeps(cfg):
    return {"tau2": run_sweep_tau2(cfg), "sigma": run_sweep_sigma(cfg)}


def _heat_cell(args):
    p, q, beta, lam = args
    try:
        A = capacity_A(p.with_(beta=beta, lam=lam), q)
    except NumericalError as exc:
        return beta, lam, math.nan, math.nan, math.nan, f"failed: {exc}"
    pol = _policy_or_none(A, p.b)
    if pol is None:
        return beta, lam, A, math.nan, math.nan, "no policy"
    return beta, lam, A, pol.h_star, pol.y_star, "ok"


def _grid_table(matrix, betas, lams):
    columns = ["lambda"] + [f"beta={b:.12g}" for b in betas]
    rows = [[float(lam)] + [float(v) for v in matrix[i]] for i, lam in enumerate(lams)]
    return ResultTable(columns, rows)


def run_heatmaps(cfg, threads=1):
    """Purely analytic h*(beta, lambda) and Y*(beta, lambda); failed cells become NaN."""
    p, q = cfg.model, cfg.quad
    betas = parse_grid(cfg.experiment.beta_grid)
    lams = parse_grid(cfg.experiment.lambda_grid)
    cells = parallel_map(_heat_cell, [(p, q, float(b), float(l)) for b, l in itertools.product(betas, lams)],
                         threads)
    h_grid = np.full((len(lams), len(betas)), np.nan)
    y_grid = np.full_like(h_grid, np.nan)
    for k, (_, _, _, hs, ys, _) in enumerate(cells):
        i, j = divmod(k, len(lams))
        h_grid[j, i] = hs
        y_grid[j, i] = ys
    failures = [c for c in cells if c[5] != "ok"]
    table = ResultTable(["beta", "lambda", "A", "h_star", "y_star", "status"], [list(c) for c in cells],
                        {"lambda": "1/jump-size", "h_star": "1/time", "y_star": "population/time"},
                        {"n_cells": len(cells), "n_failed": len(failures), "sigma": p.sigma, "tau2": p.tau2})
    table.extras["h_star_grid"] = _grid_table(h_grid, betas, lams)
    table.extras["y_star_grid"] = _grid_table(y_grid, betas, lams)
    return table


def run_paths_figure(cfg):
    """One trajectory per effort, all driven by the same stream."""
    p, q, sim = cfg.model, cfg.quad, cfg.sim
    efforts = parse_list(cfg.experiment.table1_h)
    records = [simulate_path(p.with_(h=h), sim, q) for h in efforts]
    times = records[0].times
    columns = ["t"] + [f"x_h={h:g}" for h in efforts]
    rows = [[float(t)] + [float(r.states[k]) for r in records] for k, t in enumerate(times)]
    meta = {f"h={h:g}": {"time_avg": r.time_average(sim.burn_in), "terminal_x": r.terminal_x,
                         "extinct_at": r.extinct_at}
            for h, r in zip(efforts, records)}
    return ResultTable(columns, rows, {"t": "time"}, meta)


def run_stability_check(cfg, threads=1):
    """Synchronous-coupling decay plus pairwise terminal W1 across initial states."""
    p, q, sim = cfg.model, cfg.quad, cfg.sim
    exp = cfg.experiment
    x0s = parse_list(exp.stability_x0)
    lo, hi = min(x0s), max(x0s)
    csim = sim.replace(horizon=min(exp.coupling_horizon, sim.horizon), scheme=Scheme(exp.coupling_scheme))
    report = coupling_decay(simulate_coupled_ensemble(p, csim, exp.coupling_pairs, lo, hi, threads, q))

    # terminal states only: one record at each end of the horizon
    tsim = sim.replace(record_stride=sim.n_steps)
    terminal = {}
    for k, x0 in enumerate(x0s):
        ens = simulate_ensemble(p, tsim.replace(x0=x0, stream_id=sim.stream_id + 100 + k),
                                exp.stability_paths, threads, q)
        terminal[x0] = np.array([r.terminal_x for r in ens])
    rows = []
    pairs = list(itertools.combinations(x0s, 2)) or [(x0s[0], x0s[0])]
    for a, b in pairs:
        w1 = wasserstein1(terminal[a], terminal[b])
        se = pooled_stderr(terminal[a], terminal[b]) if a != b else 0.0
        rows.append([a, b, w1, se, w1 / se if se > 0 else 0.0, w1 <= 3 * se])
    table = ResultTable(["x0_a", "x0_b", "w1", "pooled_stderr", "w1_over_stderr", "below_3_stderr"], rows,
                        {"w1": "population", "pooled_stderr": "population"},
                        {"coupling_x0": [lo, hi], "coupling_final_over_initial": report.final_over_initial,
                         "coupling_horizon": csim.horizon, "terminal_means": {str(k): float(v.mean())
                                                                              for k, v in terminal.items()}})
    table.extras["coupling"] = ResultTable(
        ["t", "mean_abs_gap", "gap_stderr"],
        [[float(t), float(g), float(s)] for t, g, s in zip(report.times, report.mean_abs_gap, report.gap_stderr)],
    )
    return table


def figures_for(command, table, timestamp=None):
    """SVG figures for a command's result table."""
    if command == "table1":
        h = table.as_array("h")
        return {"plot": svg.line_chart(
            [{"x": h, "y": table.as_array("time_avg"), "label": "simulated", "kind": "scatter"},
             {"x": h, "y": np.nan_to_num(table.as_array("mean_theory")), "label": "Phi/b", "kind": "scatter"}],
            "Time-average population by harvesting effort", "h", "time average of x", timestamp)}
    if command == "yield-curve":
        series = [{"x": table.as_array("h"), "y": table.as_array("yield"), "label": "Y(h)"},
                  {"x": [table.meta["h_star"]], "y": [table.meta["y_star"]], "label": "(h*, Y*)",
                   "kind": "scatter"}]
        if "scatter" in table.extras:
            sc = table.extras["scatter"]
            series.append({"x": sc.as_array("h"), "y": sc.as_array("yield_sim"), "label": "simulated",
                           "kind": "scatter"})
        return {"plot": svg.line_chart(series, "Expected sustainable yield", "h", "Y(h)", timestamp)}
    if command in ("sweep-tau2", "sweep-sigma"):
        xname = "tau2" if command == "sweep-tau2" else "sigma"
        x = table.as_array(xname)
        figs = {}
        for col, name in (("h_star", "plot"), ("y_star", "plot_y_star")):
            series = [{"x": x, "y": table.as_array(col), "label": col}]
            if command == "sweep-sigma":
                s0 = table.meta["sigma0"]
                key = "h_star_at_sigma0" if col == "h_star" else "y_star_at_sigma0"
                if table.meta.get(key) is not None:
                    series.append({"x": [s0], "y": [table.meta[key]], "label": "sigma0", "kind": "scatter"})
            figs[name] = svg.line_chart(series, f"{col} versus {xname}", xname, col, timestamp)
        return figs
    if command == "heatmap":
        figs = {}
        for col, name in (("h_star", "plot"), ("y_star", "plot_y_star")):
            grid = table.extras[f"{col}_grid"]
            lams = grid.as_array("lambda")
            betas = np.array([float(c.split("=", 1)[1]) for c in grid.columns[1:]])
            matrix = np.array([[np.nan if v is None else v for v in row[1:]] for row in grid.rows], dtype=float)
            figs[name] = svg.heatmap(matrix, betas, lams, f"{col} over (beta, lambda)", "beta", "lambda",
                                     col, timestamp, xlim=BETA_DOMAIN, ylim=LAMBDA_DOMAIN)
        return figs
    if command == "paths":
        t = table.as_array("t")
        series = [{"x": t, "y": table.as_array(c), "label": c[2:]} for c in table.columns[1:]]
        return {"plot": svg.line_chart(series, "Population paths by harvesting effort", "t", "x(t)", timestamp)}
    if command == "stability":
        c = table.extras["coupling"]
        return {"plot": svg.line_chart(
            [{"x": c.as_array("t"), "y": c.as_array("mean_abs_gap"), "label": "E|x - x~|"}],
            "Synchronous coupling gap", "t", "mean |x_a - x_b|", timestamp)}
    return {}
