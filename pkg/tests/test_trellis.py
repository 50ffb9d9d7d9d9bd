"""Trellis tables, encoder and BCJR against independent bit-level oracles."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from turbofade.trellis import DEFAULT_LLR_CAP, RscSpec, bcjr, build_trellis, rsc_encode


# ---------------------------------------------------------------------------
# Oracles: straight shift-register simulation and exhaustive MAP enumeration.
# Deliberately table-free so they share nothing with the implementation.
# ---------------------------------------------------------------------------

def _taps(poly, memory):
    # Coefficient of D^j is bit (memory - j); index 0 is the constant term.
    return [(poly >> (memory - j)) & 1 for j in range(memory + 1)]


def oracle_step(regs, u, fb, ff):
    a = u
    for j in range(1, len(fb)):
        a ^= fb[j] & regs[j - 1]
    p = ff[0] & a
    for j in range(1, len(ff)):
        p ^= ff[j] & regs[j - 1]
    return [a] + regs[:-1], p


def oracle_encode(bits, feedback=0o13, feedforward=0o15, memory=3, terminate=True,
                  start_regs=None):
    fb = _taps(feedback, memory)
    ff = _taps(feedforward, memory)
    regs = [0] * memory if start_regs is None else list(start_regs)
    parity, tail = [], []
    for u in bits:
        regs, p = oracle_step(regs, int(u), fb, ff)
        parity.append(p)
    if terminate:
        for _ in range(memory):
            # termination input equals the feedback sum so the new bit is 0
            u = 0
            for j in range(1, len(fb)):
                u ^= fb[j] & regs[j - 1]
            tail.append(u)
            regs, p = oracle_step(regs, u, fb, ff)
            parity.append(p)
        assert regs == [0] * memory
    return parity, tail, regs


def oracle_map_extrinsics(sys_llr, par_llr, apr_llr, boundary, memory=3,
                          feedback=0o13, feedforward=0o15):
    """Posterior LLRs by summation over every valid input sequence."""
    n = len(sys_llr)
    if boundary == "terminated":
        k = n - memory
        starts = [[0] * memory]
    else:
        k = n
        starts = [list(map(int, f"{s:0{memory}b}")) for s in range(2 ** memory)]
    num = np.full(n, -np.inf)
    den = np.full(n, -np.inf)
    for regs0 in starts:
        for word in itertools.product((0, 1), repeat=k):
            if boundary == "terminated":
                parity, tail, _ = oracle_encode(word, feedback, feedforward, memory,
                                                terminate=True, start_regs=regs0)
                inputs = list(word) + tail
            else:
                parity, _, _ = oracle_encode(word, feedback, feedforward, memory,
                                             terminate=False, start_regs=regs0)
                inputs = list(word)
            ll = 0.0
            for t in range(n):
                ll += 0.5 * (1 - 2 * inputs[t]) * (sys_llr[t] + apr_llr[t])
                ll += 0.5 * (1 - 2 * parity[t]) * par_llr[t]
            for t in range(n):
                if inputs[t] == 0:
                    num[t] = np.logaddexp(num[t], ll)
                else:
                    den[t] = np.logaddexp(den[t], ll)
    app = num - den
    return app - sys_llr - apr_llr


# ---------------------------------------------------------------------------
# Frozen values (computed with oracle_encode).
# ---------------------------------------------------------------------------

IMPULSE_PARITY = [1, 1, 1, 1, 0, 0, 1, 0]
IMPULSE_PARITY_TERMINATED = [1, 1, 1, 1, 0, 0, 1, 0, 1, 0, 1]
IMPULSE_TAIL = [0, 1, 1]


def test_oracle_reproduces_frozen_impulse():
    parity, tail, regs = oracle_encode([1, 0, 0, 0, 0, 0, 0, 0], terminate=False)
    assert parity == IMPULSE_PARITY
    parity_t, tail_t, _ = oracle_encode([1, 0, 0, 0, 0, 0, 0, 0], terminate=True)
    assert parity_t == IMPULSE_PARITY_TERMINATED
    assert tail_t == IMPULSE_TAIL


def test_encoder_matches_frozen_impulse(trellis):
    bits = np.array([1, 0, 0, 0, 0, 0, 0, 0], dtype=np.int8)
    parity, tail = rsc_encode(trellis, bits, terminate=False)
    assert parity.tolist() == IMPULSE_PARITY
    parity, tail = rsc_encode(trellis, bits, terminate=True)
    assert parity.tolist() == IMPULSE_PARITY_TERMINATED
    assert tail.tolist() == IMPULSE_TAIL


def test_tables_match_oracle(trellis):
    fb = _taps(0o13, 3)
    ff = _taps(0o15, 3)
    for s in range(8):
        regs = [(s >> 2) & 1, (s >> 1) & 1, s & 1]
        for u in (0, 1):
            regs2, p = oracle_step(regs, u, fb, ff)
            s2 = (regs2[0] << 2) | (regs2[1] << 1) | regs2[2]
            assert trellis.next_state[s, u] == s2
            assert trellis.parity[s, u] == p
    # zero state, zero input stays put with zero parity
    assert trellis.next_state[0, 0] == 0
    assert trellis.parity[0, 0] == 0


def test_all_zero_input_all_zero_parity(trellis):
    parity, tail = rsc_encode(trellis, np.zeros(6, dtype=np.int8))
    assert not parity.any()
    assert not tail.any()


def test_branches_lead_to_distinct_states(trellis):
    assert (trellis.next_state[:, 0] != trellis.next_state[:, 1]).all()


def test_encoder_matches_oracle_random(trellis, rng):
    for _ in range(25):
        k = int(rng.integers(1, 40))
        bits = rng.integers(0, 2, size=k).astype(np.int8)
        parity, tail = rsc_encode(trellis, bits, terminate=True)
        o_parity, o_tail, regs = oracle_encode(bits.tolist())
        assert parity.tolist() == o_parity
        assert tail.tolist() == o_tail
        assert regs == [0, 0, 0]


def test_encoding_is_linear(trellis, rng):
    # parity of the XOR equals XOR of parities, tails included
    for _ in range(10):
        a = rng.integers(0, 2, size=24).astype(np.int8)
        b = rng.integers(0, 2, size=24).astype(np.int8)
        pa, ta = rsc_encode(trellis, a)
        pb, tb = rsc_encode(trellis, b)
        pc, tc = rsc_encode(trellis, a ^ b)
        assert ((pa ^ pb) == pc).all()
        assert ((ta ^ tb) == tc).all()


def test_rejects_bad_polynomials():
    with pytest.raises(ValueError):
        RscSpec(feedback=0o3, memory=3)  # constant term not set at this memory
    with pytest.raises(ValueError):
        RscSpec(feedback=0o45, memory=3)  # does not fit in memory+1 taps


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bcjr_matches_enumeration_terminated(trellis, seed):
    rng = np.random.default_rng(seed)
    k, memory = 8, 3
    n = k + memory
    sys_llr = rng.normal(0.0, 3.0, size=n)
    par_llr = rng.normal(0.0, 3.0, size=n)
    apr_llr = rng.normal(0.0, 2.0, size=n)
    ext = bcjr(trellis, sys_llr, par_llr, apr_llr, boundary="terminated")
    oracle = oracle_map_extrinsics(sys_llr, par_llr, apr_llr, "terminated")
    assert np.max(np.abs(ext - oracle)) < 1e-9


@pytest.mark.parametrize("seed", [3, 4])
def test_bcjr_matches_enumeration_equiprobable(trellis, seed):
    rng = np.random.default_rng(seed)
    n = 7
    sys_llr = rng.normal(0.0, 3.0, size=n)
    par_llr = rng.normal(0.0, 3.0, size=n)
    apr_llr = rng.normal(0.0, 2.0, size=n)
    ext = bcjr(trellis, sys_llr, par_llr, apr_llr, boundary="equiprobable")
    oracle = oracle_map_extrinsics(sys_llr, par_llr, apr_llr, "equiprobable")
    assert np.max(np.abs(ext - oracle)) < 1e-9


def test_bcjr_punctured_zero_is_exact_marginalization(trellis):
    # a 0.0 parity LLR contributes the same metric to both branches, which is
    # exactly the enumeration with that observation dropped
    rng = np.random.default_rng(7)
    n = 9
    sys_llr = rng.normal(0.0, 3.0, size=n)
    par_llr = rng.normal(0.0, 3.0, size=n)
    par_llr[::3] = 0.0
    apr = np.zeros(n)
    ext = bcjr(trellis, sys_llr, par_llr, apr, boundary="equiprobable")
    oracle = oracle_map_extrinsics(sys_llr, par_llr, apr, "equiprobable")
    assert np.max(np.abs(ext - oracle)) < 1e-9


def test_bcjr_sign_symmetry_equiprobable(trellis, rng):
    n = 200
    sys_llr = rng.normal(0.0, 4.0, size=n)
    par_llr = rng.normal(0.0, 4.0, size=n)
    apr_llr = rng.normal(0.0, 1.0, size=n)
    ext_pos = bcjr(trellis, sys_llr, par_llr, apr_llr, boundary="equiprobable")
    ext_neg = bcjr(trellis, -sys_llr, -par_llr, -apr_llr, boundary="equiprobable")
    assert np.max(np.abs(ext_pos + ext_neg)) < 1e-12


def test_bcjr_apriori_is_additive_with_systematic(trellis, rng):
    n = 50
    sys_llr = rng.normal(0.0, 3.0, size=n)
    par_llr = rng.normal(0.0, 3.0, size=n)
    apr_llr = rng.normal(0.0, 2.0, size=n)
    a = bcjr(trellis, sys_llr, par_llr, apr_llr)
    b = bcjr(trellis, sys_llr + apr_llr, par_llr, np.zeros(n))
    assert np.max(np.abs(a - b)) == 0.0


def test_bcjr_noiseless_codeword_round_trip(trellis, rng):
    k, memory = 12, 3
    bits = rng.integers(0, 2, size=k).astype(np.int8)
    parity, tail = rsc_encode(trellis, bits)
    inputs = np.concatenate([bits, tail])
    cap = DEFAULT_LLR_CAP
    sys_llr = cap * (1.0 - 2.0 * inputs)
    par_llr = cap * (1.0 - 2.0 * parity)
    ext = bcjr(trellis, sys_llr, par_llr)
    app = ext + sys_llr
    assert ((app < 0).astype(np.int8) == inputs).all()
    # saturated inputs, decisive outputs
    assert np.min(np.abs(app)) > 10.0


def test_bcjr_saturates_inputs(trellis):
    n = 8
    sys_big = np.full(n, 1e6)
    par = np.zeros(n)
    a = bcjr(trellis, sys_big, par, boundary="equiprobable")
    b = bcjr(trellis, np.full(n, DEFAULT_LLR_CAP), par, boundary="equiprobable")
    assert np.array_equal(a, b)
