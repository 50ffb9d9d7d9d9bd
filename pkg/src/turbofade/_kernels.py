"""Numba kernels for the log-domain BCJR recursions.

Hot loops only: validation, saturation and boundary handling live in the
wrappers. Everything is float64 and allocation-light so a single call over a
10^4-step window stays in the tens of milliseconds on one core.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# Log-domain stand-in for "impossible". Finite so that differences of two
# impossible metrics never produce nan; any accumulated path penalty is
# bounded by n_steps * llr_cap, which is negligible against 1e30.
NEG = -1.0e30


@njit(cache=True, inline="always")
def _max_star(a, b):
    # Exact Jacobian logarithm. The correction term underflows float64 once
    # the gap exceeds ~37, so skipping it there is still exact.
    if a < b:
        a, b = b, a
    d = a - b
    if d > 37.0:
        return a
    return a + np.log1p(np.exp(-d))


@njit(cache=True)
def bcjr_app(next_state, parity, in_llr, par_llr, alpha0, beta_end):
    """A-posteriori LLRs for one trellis section.

    in_llr is the combined systematic-plus-a-priori LLR per step, par_llr the
    parity observation (exactly 0.0 where punctured or erased). alpha0 and
    beta_end are log-domain boundary weights over states. Per-step
    normalization cancels in the APP difference, so the output is exact.
    """
    n = in_llr.shape[0]
    n_states = next_state.shape[0]

    beta = np.empty((n + 1, n_states))
    for s in range(n_states):
        beta[n, s] = beta_end[s]
    for t in range(n - 1, -1, -1):
        ci = 0.5 * in_llr[t]
        cp = 0.5 * par_llr[t]
        m = NEG
        for s in range(n_states):
            acc = NEG
            for u in range(2):
                g = (ci if u == 0 else -ci) + (cp if parity[s, u] == 0 else -cp)
                acc = _max_star(acc, g + beta[t + 1, next_state[s, u]])
            beta[t, s] = acc
            if acc > m:
                m = acc
        for s in range(n_states):
            beta[t, s] -= m

    app = np.empty(n)
    alpha = alpha0.copy()
    nxt = np.empty(n_states)
    for t in range(n):
        ci = 0.5 * in_llr[t]
        cp = 0.5 * par_llr[t]
        acc0 = NEG
        acc1 = NEG
        for s in range(n_states):
            nxt[s] = NEG
        for s in range(n_states):
            a = alpha[s]
            for u in range(2):
                g = (ci if u == 0 else -ci) + (cp if parity[s, u] == 0 else -cp)
                v = a + g
                sn = next_state[s, u]
                w = v + beta[t + 1, sn]
                if u == 0:
                    acc0 = _max_star(acc0, w)
                else:
                    acc1 = _max_star(acc1, w)
                nxt[sn] = _max_star(nxt[sn], v)
        app[t] = acc0 - acc1
        m = NEG
        for s in range(n_states):
            if nxt[s] > m:
                m = nxt[s]
        for s in range(n_states):
            alpha[s] = nxt[s] - m
    return app


@njit(cache=True)
def encode_walk(next_state, parity, tail_input, memory_steps, bits, terminate):
    """Table-driven RSC encoder walk. Returns (parity bits, tail bits)."""
    k = bits.shape[0]
    n = k + memory_steps if terminate else k
    par = np.empty(n, dtype=np.int8)
    tail = np.empty(memory_steps if terminate else 0, dtype=np.int8)
    s = 0
    for t in range(k):
        u = bits[t]
        par[t] = parity[s, u]
        s = next_state[s, u]
    if terminate:
        for j in range(memory_steps):
            u = tail_input[s]
            tail[j] = u
            par[k + j] = parity[s, u]
            s = next_state[s, u]
    return par, tail
