"""Rate-1/2 recursive systematic convolutional code: tables, encoder, BCJR.

Tap polynomials are given in octal with the most significant bit as the
constant term, so the default (13, 15) pair means a 1 + D^2 + D^3 feedback
polynomial and a 1 + D + D^3 feedforward one. LLRs follow the convention
log p(y|bit=0) / p(y|bit=1): positive values favor bit 0, and bit 0 maps to
the +1 channel symbol.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import NEG, bcjr_app, encode_walk

DEFAULT_LLR_CAP = 50.0


@dataclass(frozen=True)
class RscSpec:
    """Tap polynomials (octal integers, MSB = constant term) and memory."""

    feedback: int = 0o13
    feedforward: int = 0o15
    memory: int = 3

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be at least 1")
        limit = 1 << (self.memory + 1)
        for name, poly in (("feedback", self.feedback), ("feedforward", self.feedforward)):
            if not 0 < poly < limit:
                raise ValueError(
                    f"{name} polynomial {poly:#o} does not fit in memory+1 = "
                    f"{self.memory + 1} taps"
                )
        if not (self.feedback >> self.memory) & 1:
            raise ValueError("feedback polynomial must have its constant term set")


class Trellis:
    """Precomputed branch tables for one RSC section.

    State packs the shift register with the most recent feedback bit in the
    most significant position. From every state the two input branches lead
    to distinct next states (they differ in that significant bit).
    """

    __slots__ = ("spec", "n_states", "next_state", "parity", "tail_input")

    def __init__(self, spec: RscSpec):
        self.spec = spec
        m = spec.memory
        self.n_states = 1 << m
        reg_mask = self.n_states - 1
        fb_taps = spec.feedback & reg_mask
        ff_taps = spec.feedforward & reg_mask
        ff_const = (spec.feedforward >> m) & 1

        next_state = np.zeros((self.n_states, 2), dtype=np.int64)
        parity = np.zeros((self.n_states, 2), dtype=np.int8)
        tail_input = np.zeros(self.n_states, dtype=np.int8)
        for s in range(self.n_states):
            fb = _bit_parity(s & fb_taps)
            tail_input[s] = fb
            for u in (0, 1):
                a = u ^ fb
                parity[s, u] = (ff_const & a) ^ _bit_parity(s & ff_taps)
                next_state[s, u] = (a << (m - 1)) | (s >> 1)
        self.next_state = next_state
        self.parity = parity
        self.tail_input = tail_input


def _bit_parity(x: int) -> int:
    p = 0
    while x:
        p ^= x & 1
        x >>= 1
    return p


def build_trellis(spec: RscSpec | None = None) -> Trellis:
    return Trellis(spec if spec is not None else RscSpec())


def rsc_encode(trellis: Trellis, bits: np.ndarray, terminate: bool = True):
    """Encode an information bit sequence.

    Returns (parity, tail): parity has one bit per trellis step, including the
    memory tail steps when terminating; tail holds the termination inputs
    (empty when terminate is False).
    """
    bits = np.ascontiguousarray(bits, dtype=np.int8)
    if bits.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0/1")
    return encode_walk(
        trellis.next_state,
        trellis.parity,
        trellis.tail_input,
        trellis.spec.memory,
        bits,
        terminate,
    )


def _boundary_weights(boundary: str, n_states: int) -> tuple[np.ndarray, np.ndarray]:
    pinned = np.full(n_states, NEG)
    pinned[0] = 0.0
    free = np.zeros(n_states)
    if boundary == "terminated":
        return pinned, pinned.copy()
    if boundary == "equiprobable":
        return free, free.copy()
    if boundary == "start-anchored":
        return pinned, free
    raise ValueError(f"unknown boundary {boundary!r}")


def bcjr(
    trellis: Trellis,
    sys_llr: np.ndarray,
    par_llr: np.ndarray,
    apriori_llr: np.ndarray | None = None,
    boundary: str = "terminated",
    llr_cap: float = DEFAULT_LLR_CAP,
) -> np.ndarray:
    """Extrinsic LLRs for every step of one trellis section.

    Parameters
    ----------
    sys_llr, par_llr : arrays of per-step channel LLRs; punctured or erased
        positions must be exactly 0.0.
    apriori_llr : optional per-step a-priori LLRs (default all zero).
    boundary : "terminated" pins state 0 at both ends (the caller includes
        the tail steps in the inputs); "equiprobable" leaves both ends free,
        which is the interior-window setting used by density evolution;
        "start-anchored" pins only the start, the per-segment decode setting
        when termination tails are never transmitted (an unobserved tail
        makes the end boundary exactly uniform, so it is dropped).
    llr_cap : saturation applied to inputs and outputs.

    Returns
    -------
    extrinsic : array, app - sys - apriori per step, saturated at llr_cap.
    """
    sys_llr = np.asarray(sys_llr, dtype=np.float64)
    par_llr = np.asarray(par_llr, dtype=np.float64)
    if sys_llr.shape != par_llr.shape or sys_llr.ndim != 1:
        raise ValueError("sys_llr and par_llr must be 1-d arrays of equal length")
    if apriori_llr is None:
        apriori_llr = np.zeros_like(sys_llr)
    else:
        apriori_llr = np.asarray(apriori_llr, dtype=np.float64)
        if apriori_llr.shape != sys_llr.shape:
            raise ValueError("apriori_llr length mismatch")

    in_llr = np.clip(sys_llr, -llr_cap, llr_cap) + np.clip(apriori_llr, -llr_cap, llr_cap)
    par = np.clip(par_llr, -llr_cap, llr_cap)
    w_start, w_end = _boundary_weights(boundary, trellis.n_states)
    app = bcjr_app(trellis.next_state, trellis.parity, in_llr, par, w_start, w_end)
    ext = app - in_llr
    return np.clip(ext, -llr_cap, llr_cap)
