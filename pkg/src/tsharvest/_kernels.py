"""Compiled inner loops for the path integrators.

Each kernel advances ``m`` paths that share one noise chunk (m > 1 only for
synchronous coupling).  ``state`` is (m,) and holds x (Euler) or ln x
(log scheme); ``integral`` accumulates the trapezoid integral of x at full
resolution; ``run_start`` tracks the first step of the current stretch at or
below the extinction level (-1 when above).  Returns -1 on success or the
global step index where the state became non-finite.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def euler_chunk(state, integral, run_start, offset, dt, growth, b, tau_sqdt, sigma,
                xi, dl, floor, level, stride, rec_states, rec_integral):
    n = xi.shape[0]
    for j in range(state.shape[0]):
        x = state[j]
        acc = integral[j]
        rs = run_start[j]
        for i in range(n):
            k = offset + i + 1
            x_new = x + x * (growth - b * x) * dt + tau_sqdt * x * xi[i] + sigma * x * dl[i]
            if not math.isfinite(x_new):
                return k
            if x_new <= 0.0:
                x_new = floor
            acc += 0.5 * (x + x_new) * dt
            x = x_new
            if x <= level:
                if rs < 0:
                    rs = k
            else:
                rs = -1
            if k % stride == 0:
                rec_states[j, k // stride] = x
                rec_integral[j, k // stride] = acc
        state[j] = x
        integral[j] = acc
        run_start[j] = rs
    return -1


@numba.njit(cache=True, nogil=True)
def log_chunk(state, integral, run_start, offset, dt, mu, b, tau_sqdt, small_sd,
              xi, eta, log_jumps, level, stride, rec_states, rec_integral):
    n = xi.shape[0]
    has_eta = eta.shape[0] == n
    for j in range(state.shape[0]):
        y = state[j]
        x = math.exp(y)
        acc = integral[j]
        rs = run_start[j]
        for i in range(n):
            k = offset + i + 1
            y += (mu - b * x) * dt + tau_sqdt * xi[i] + log_jumps[i]
            if has_eta:
                y += small_sd * eta[i]
            if not math.isfinite(y) or y > 709.0:
                return k
            x_new = math.exp(y)
            acc += 0.5 * (x + x_new) * dt
            x = x_new
            if x <= level:
                if rs < 0:
                    rs = k
            else:
                rs = -1
            if k % stride == 0:
                rec_states[j, k // stride] = x
                rec_integral[j, k // stride] = acc
        state[j] = y
        integral[j] = acc
        run_start[j] = rs
    return -1


EMPTY = np.empty(0)
