"""Finite-length code construction: repeater, interleaver, multiplexer, decoder.

The encoder repeats each information bit by its degree, permutes the repeated
stream, and drives a single punctured rate-1/2 RSC over it. The trellis is
partitioned into beta contiguous segments (beta = average degree, which must
be an integer here); each segment restarts the encoder in state 0 and is
decoded with a start-anchored BCJR. Termination tails are appended by the
encoder but never transmitted, so the frame is exactly k/R_c symbols and the
realized rate equals the target.

Slot taxonomy over the two fading blocks, for rate 1/2:

* segment 1 hosts every information bit exactly once, alternating
  - "anchor" slots (even columns): a block-1 bit's systematic symbol goes
    out on block 1 and the transition parity goes out on block 2;
  - "plain" slots (odd columns): a block-2 bit's systematic symbol goes out
    on block 2 and the parity is punctured.
* segments 2..beta mix
  - "pin" slots on a staggered periodic rhythm: the single repeat of a
    block-2 bit, whose transition parity goes out on block 1;
  - "free" slots: the remaining repeats of block-1 bits, parity punctured.

Block 1 owns every bit of degree above 2 plus enough degree-2 bits to make
k/2; block 2 owns the remaining degree-2 bits. Wherever a parity is
transmitted it therefore crosses to the opposite block of its input bit,
which is what lets a decoder walk any single-block erasure: with block 1
erased, segment 1 alternates known inputs and parity-pinned inputs; with
block 2 erased, segments 2..beta do the same through pins and known repeats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ensemble import CodeConfig, DegreeProfile, derive_code_params
from .trellis import DEFAULT_LLR_CAP, Trellis, bcjr, build_trellis, rsc_encode

SERIAL_FORMAT = "turbofade-code-v1"

# slot classes
ANCHOR = 0
PLAIN = 1
PIN = 2
FREE = 3


class LayoutError(ValueError):
    """A profile/frame-size pair the multiplexer construction cannot realize."""


@dataclass(frozen=True)
class FrameLayout:
    """Deterministic slot bookkeeping for one frame size.

    All arrays cover the n_edges data steps of the trellis (tails excluded).
    The layout depends only on (profile, k), never on the seed: it is the
    single source of truth for both code building and density evolution.
    """

    config: CodeConfig
    k: int
    n_edges: int
    beta: int
    segment_starts: np.ndarray     # beta+1 offsets, segment j = [s[j], s[j+1])
    slot_class: np.ndarray         # int8, ANCHOR/PLAIN/PIN/FREE
    parity_tx: np.ndarray          # bool
    parity_block: np.ndarray       # int8, 1/2 where parity_tx else 0
    sys_block: np.ndarray          # int8, 1/2 on segment-1 slots else 0
    pin_period: int
    pin_offsets: tuple[int, ...]   # per later segment, 0-based

    @property
    def segment_length(self) -> int:
        return self.k

    def segment_slice(self, j: int) -> slice:
        return slice(int(self.segment_starts[j]), int(self.segment_starts[j + 1]))


def plan_layout(profile: DegreeProfile, k: int, config: CodeConfig | None = None) -> FrameLayout:
    if config is None:
        config = derive_code_params(profile)
    if config.code_rate != Fraction(1, 2) or config.mother_rate != Fraction(1, 2):
        raise LayoutError("the multiplexer construction targets overall rate 1/2 "
                          "from a rate-1/2 mother code")
    d_bar = config.average_degree
    if d_bar.denominator != 1:
        raise LayoutError(
            f"average degree {d_bar} is not an integer; the periodic slot layout "
            "is only defined for integer average degrees")
    beta = config.segment_count
    if beta != int(d_bar):
        raise LayoutError("segment count must equal the integer average degree")
    if k % 2:
        raise LayoutError("frame size k must be even to split the blocks equally")
    counts = profile.class_counts(k)
    n_high = sum(c for d, c in counts.items() if d > 2)
    if n_high > k // 2:
        raise LayoutError(
            f"{n_high} bits of degree > 2 exceed the k/2 = {k // 2} capacity of block 1")
    n = k * beta

    # pin rhythm: 1 - segment puncture fraction must come out at 1/(2(beta-1))
    # for this taxonomy to balance; integer-degree rate-1/2 profiles always do.
    if beta < 2:
        raise LayoutError("need at least two segments")
    keep = 1 - config.segment_puncture_fraction
    if keep != Fraction(1, 2 * (beta - 1)):
        raise LayoutError(
            f"segment parity keep fraction {keep} does not fit the periodic rhythm")
    period = 2 * (beta - 1)
    offsets = tuple((1 + 2 * (j - 2)) % period for j in range(2, beta + 1))

    slot_class = np.empty(n, dtype=np.int8)
    parity_tx = np.zeros(n, dtype=bool)
    parity_block = np.zeros(n, dtype=np.int8)
    sys_block = np.zeros(n, dtype=np.int8)

    cols = np.arange(k)
    slot_class[:k] = np.where(cols % 2 == 0, ANCHOR, PLAIN)
    sys_block[:k] = np.where(cols % 2 == 0, 1, 2)
    parity_tx[:k] = cols % 2 == 0
    parity_block[:k][cols % 2 == 0] = 2

    for j in range(2, beta + 1):
        start = (j - 1) * k
        seg = np.full(k, FREE, dtype=np.int8)
        pin_cols = np.arange(offsets[j - 2], k, period)
        seg[pin_cols] = PIN
        slot_class[start:start + k] = seg
        parity_tx[start:start + k][pin_cols] = True
        parity_block[start:start + k][pin_cols] = 1

    # exact counting identities; any failure is a construction bug
    n_anchor = int((slot_class == ANCHOR).sum())
    n_plain = int((slot_class == PLAIN).sum())
    n_pin = int((slot_class == PIN).sum())
    n_free = int((slot_class == FREE).sum())
    checks = [
        ("anchor slots must cover block 1", n_anchor == k // 2),
        ("plain slots must cover block 2", n_plain == k // 2),
        ("pin slots must cover block 2 repeats", n_pin == k // 2),
        ("free slots must cover block-1 repeats", n_free == n - k - k // 2),
        ("transmitted parity must total k", int(parity_tx.sum()) == k),
        ("block 1 must carry exactly k symbols",
         n_anchor + int((parity_block == 1).sum()) == k),
        ("block 2 must carry exactly k symbols",
         n_plain + int((parity_block == 2).sum()) == k),
    ]
    for message, ok in checks:
        if not ok:
            raise LayoutError(message)

    for arr in (slot_class, parity_tx, parity_block, sys_block):
        arr.flags.writeable = False
    starts = np.arange(beta + 1, dtype=np.int64) * k
    starts.flags.writeable = False
    return FrameLayout(
        config=config, k=k, n_edges=n, beta=beta, segment_starts=starts,
        slot_class=slot_class, parity_tx=parity_tx, parity_block=parity_block,
        sys_block=sys_block, pin_period=period, pin_offsets=offsets,
    )


@dataclass(frozen=True)
class CodeInstance:
    """One sampled code: layout plus the random bit/slot assignment.

    slot_bit maps every data step to the information bit whose repeat it
    carries. permutation is the induced interleaver over the canonical
    bit-major edge enumeration. Symbol arrays define the transmitted frame:
    ascending trellis step, systematic before parity at a shared step.
    """

    profile: DegreeProfile
    layout: FrameLayout
    trellis: Trellis
    seed: int
    bit_degree: np.ndarray     # int32[k]
    bit_block: np.ndarray      # int8[k]
    slot_bit: np.ndarray       # int64[n_edges]
    permutation: np.ndarray    # int64[n_edges]
    achieved_spread: int
    sym_is_parity: np.ndarray  # bool[2k]
    sym_step: np.ndarray       # int64[2k]
    sym_bit: np.ndarray        # int64[2k], -1 on parity symbols
    sym_block: np.ndarray      # int8[2k]

    @property
    def k(self) -> int:
        return self.layout.k

    @property
    def frame_length(self) -> int:
        return 2 * self.layout.k

    def equals(self, other: "CodeInstance") -> bool:
        return (self.profile == other.profile and self.k == other.k
                and np.array_equal(self.slot_bit, other.slot_bit)
                and np.array_equal(self.bit_block, other.bit_block)
                and np.array_equal(self.bit_degree, other.bit_degree))


def build_code(
    profile: DegreeProfile,
    k: int,
    seed: int,
    config: CodeConfig | None = None,
    trellis: Trellis | None = None,
    spread_target: int | None = None,
) -> CodeInstance:
    """Sample one code instance satisfying every multiplexer invariant."""
    layout = plan_layout(profile, k, config)
    if trellis is None:
        trellis = build_trellis()
    rng = np.random.default_rng(seed)

    counts = profile.class_counts(k)
    degree_pool = np.repeat(
        [d for d in sorted(counts)], [counts[d] for d in sorted(counts)]
    ).astype(np.int32)
    bit_degree = rng.permutation(degree_pool)

    high_bits = np.flatnonzero(bit_degree > 2)
    deg2_bits = np.flatnonzero(bit_degree == 2)
    n_fill = k // 2 - high_bits.size
    fill = rng.choice(deg2_bits, size=n_fill, replace=False)
    bit_block = np.full(k, 2, dtype=np.int8)
    bit_block[high_bits] = 1
    bit_block[fill] = 1
    block1 = np.flatnonzero(bit_block == 1)
    block2 = np.flatnonzero(bit_block == 2)

    slot_bit = np.full(layout.n_edges, -1, dtype=np.int64)
    slot_bit[np.flatnonzero(layout.slot_class == ANCHOR)] = rng.permutation(block1)
    slot_bit[np.flatnonzero(layout.slot_class == PLAIN)] = rng.permutation(block2)
    slot_bit[np.flatnonzero(layout.slot_class == PIN)] = rng.permutation(block2)

    free_slots = np.flatnonzero(layout.slot_class == FREE)
    repeats = np.repeat(block1, bit_degree[block1] - 1)
    assignment, achieved = _spread_assign(
        rng, repeats, free_slots, layout, slot_bit, spread_target)
    slot_bit[free_slots] = assignment

    _check_instance(layout, bit_degree, bit_block, slot_bit)

    # canonical interleaver: edges enumerated bit-major, a bit's edges taken
    # in ascending slot order
    edge_start = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(bit_degree, out=edge_start[1:])
    order = np.argsort(slot_bit, kind="stable")
    permutation = np.empty(layout.n_edges, dtype=np.int64)
    permutation[order] = np.arange(layout.n_edges)

    sym_is_parity, sym_step, sym_bit, sym_block = _symbol_maps(layout, slot_bit, bit_block)

    for arr in (bit_degree, bit_block, slot_bit, permutation,
                sym_is_parity, sym_step, sym_bit, sym_block):
        arr.flags.writeable = False
    return CodeInstance(
        profile=profile, layout=layout, trellis=trellis, seed=seed,
        bit_degree=bit_degree, bit_block=bit_block, slot_bit=slot_bit,
        permutation=permutation, achieved_spread=achieved,
        sym_is_parity=sym_is_parity, sym_step=sym_step,
        sym_bit=sym_bit, sym_block=sym_block,
    )


def _spread_assign(rng, repeats, free_slots, layout, slot_bit, spread_target):
    """Place block-1 repeats on free slots with same-bit spreading.

    Two repeats of one bit inside one segment must sit at least S columns
    apart (different segments never interact: each restarts the trellis).
    S starts at floor(sqrt(n_edges/2)) and decrements when the swap repair
    stalls, so the builder always returns; the achieved S is reported.
    """
    if repeats.size != free_slots.size:
        raise LayoutError("free-slot count does not match block-1 repeat count")
    s = spread_target if spread_target is not None else int(np.sqrt(layout.n_edges / 2))
    seg_of = np.searchsorted(layout.segment_starts, free_slots, side="right") - 1
    while s > 0:
        assignment = rng.permutation(repeats)
        if _spread_repair(rng, assignment, free_slots, seg_of, s):
            return assignment, s
        s -= 1
    return rng.permutation(repeats), 0


def _spread_violations(assignment, free_slots, seg_of, s):
    bad = []
    key = {}
    for i in range(assignment.size):
        key.setdefault((seg_of[i], assignment[i]), []).append(i)
    for slots in key.values():
        for a, b in zip(slots, slots[1:]):
            if free_slots[b] - free_slots[a] < s:
                bad.append(b)
    return bad


def _spread_repair(rng, assignment, free_slots, seg_of, s, max_rounds=60):
    for _ in range(max_rounds):
        bad = _spread_violations(assignment, free_slots, seg_of, s)
        if not bad:
            return True
        partners = rng.integers(0, assignment.size, size=len(bad))
        for i, j in zip(bad, partners):
            assignment[i], assignment[j] = assignment[j], assignment[i]
    return not _spread_violations(assignment, free_slots, seg_of, s)


def _check_instance(layout, bit_degree, bit_block, slot_bit):
    k = layout.k
    if np.bincount(slot_bit, minlength=k).tolist() != bit_degree.tolist():
        raise LayoutError("per-bit slot counts must equal the degrees")
    seg1 = slot_bit[:k]
    if np.bincount(seg1, minlength=k).max() != 1:
        raise LayoutError("segment 1 must host every bit exactly once")
    tx = layout.parity_tx
    if np.any(bit_block[slot_bit[tx]] == layout.parity_block[tx]):
        raise LayoutError("a transmitted parity shares its bit's fading block")
    if np.any(bit_block[slot_bit[layout.sys_block > 0]] != layout.sys_block[layout.sys_block > 0]):
        raise LayoutError("segment-1 slots must carry bits of their own block")


def _symbol_maps(layout, slot_bit, bit_block):
    steps = []
    is_par = []
    for t in range(layout.n_edges):
        if t < layout.k:
            steps.append(t)
            is_par.append(False)
        if layout.parity_tx[t]:
            steps.append(t)
            is_par.append(True)
    sym_step = np.asarray(steps, dtype=np.int64)
    sym_is_parity = np.asarray(is_par, dtype=bool)
    sym_bit = np.where(sym_is_parity, -1, slot_bit[sym_step])
    sym_block = np.where(
        sym_is_parity, layout.parity_block[sym_step], bit_block[slot_bit[sym_step]]
    ).astype(np.int8)
    if sym_step.size != 2 * layout.k:
        raise LayoutError("frame must hold exactly 2k symbols")
    ones = int((sym_block == 1).sum())
    if ones != layout.k:
        raise LayoutError("fading blocks must carry k symbols each")
    return sym_is_parity, sym_step, sym_bit, sym_block


def encode_frame(code: CodeInstance, bits: np.ndarray) -> np.ndarray:
    """Map k information bits to the 2k transmitted frame bits."""
    bits = np.ascontiguousarray(bits, dtype=np.int8)
    if bits.shape != (code.k,):
        raise ValueError(f"expected {code.k} information bits")
    layout = code.layout
    parity = np.empty(layout.n_edges, dtype=np.int8)
    for j in range(layout.beta):
        sl = layout.segment_slice(j)
        seg_parity, _ = rsc_encode(code.trellis, bits[code.slot_bit[sl]], terminate=True)
        parity[sl] = seg_parity[: layout.k]
    frame = np.empty(code.frame_length, dtype=np.int8)
    sysm = ~code.sym_is_parity
    frame[sysm] = bits[code.sym_bit[sysm]]
    frame[~sysm] = parity[code.sym_step[~sysm]]
    return frame


@dataclass(frozen=True)
class DecodeResult:
    bits: np.ndarray
    iterations: int
    converged: bool
    bit_llr: np.ndarray
    extrinsic_trace: tuple | None = None


def decode_frame(
    code: CodeInstance,
    symbol_llrs: np.ndarray,
    max_iters: int = 50,
    llr_cap: float = DEFAULT_LLR_CAP,
    trace: bool = False,
) -> DecodeResult:
    """Iterative decoding: flooding extrinsic exchange over the segments.

    Per iteration every segment runs one start-anchored BCJR whose per-slot
    input is the bit total minus the slot's own extrinsic; the bit total is
    the systematic channel LLR plus all of the bit's slot extrinsics. Stops
    early once hard decisions survive one full iteration unchanged.
    """
    symbol_llrs = np.asarray(symbol_llrs, dtype=np.float64)
    if symbol_llrs.shape != (code.frame_length,):
        raise ValueError(f"expected {code.frame_length} symbol LLRs")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    layout = code.layout
    sysm = ~code.sym_is_parity

    lc_bit = np.zeros(code.k)
    lc_bit[code.sym_bit[sysm]] = symbol_llrs[sysm]
    par_llr = np.zeros(layout.n_edges)
    par_llr[code.sym_step[~sysm]] = symbol_llrs[~sysm]

    ext = np.zeros(layout.n_edges)
    new_ext = np.empty_like(ext)
    decisions = None
    iterations = 0
    converged = False
    history = [] if trace else None
    for iterations in range(1, max_iters + 1):
        bit_total = lc_bit.copy()
        np.add.at(bit_total, code.slot_bit, ext)
        apriori = bit_total[code.slot_bit] - ext
        for j in range(layout.beta):
            sl = layout.segment_slice(j)
            new_ext[sl] = bcjr(
                code.trellis, apriori[sl], par_llr[sl],
                boundary="start-anchored", llr_cap=llr_cap)
        ext, new_ext = new_ext, ext
        if trace:
            history.append(ext.copy())
        bit_total = lc_bit.copy()
        np.add.at(bit_total, code.slot_bit, ext)
        current = bit_total < 0
        if decisions is not None and np.array_equal(current, decisions):
            converged = True
            decisions = current
            break
        decisions = current
    return DecodeResult(
        bits=decisions.astype(np.int8),
        iterations=iterations,
        converged=converged,
        bit_llr=bit_total,
        extrinsic_trace=tuple(history) if trace else None,
    )


def code_to_text(code: CodeInstance) -> str:
    """Replayable text form: profile, seed, permutation, block assignment."""
    payload = {
        "format": SERIAL_FORMAT,
        "k": code.k,
        "seed": code.seed,
        "achieved_spread": code.achieved_spread,
        "profile": {str(d): str(f) for d, f in code.profile.fractions},
        "bit_degree": code.bit_degree.tolist(),
        "bit_block": code.bit_block.tolist(),
        "permutation": code.permutation.tolist(),
    }
    return json.dumps(payload)


def code_from_text(text: str, trellis: Trellis | None = None) -> CodeInstance:
    payload = json.loads(text)
    if payload.get("format") != SERIAL_FORMAT:
        raise ValueError("unrecognized code serialization format")
    profile = DegreeProfile.from_mapping(
        {int(d): Fraction(f) for d, f in payload["profile"].items()})
    k = int(payload["k"])
    layout = plan_layout(profile, k)
    if trellis is None:
        trellis = build_trellis()
    bit_degree = np.asarray(payload["bit_degree"], dtype=np.int32)
    bit_block = np.asarray(payload["bit_block"], dtype=np.int8)
    permutation = np.asarray(payload["permutation"], dtype=np.int64)
    if sorted(permutation.tolist()) != list(range(layout.n_edges)):
        raise ValueError("permutation is not a bijection")

    # invert the canonical enumeration: edge id -> owning bit
    edge_bit = np.repeat(np.arange(k, dtype=np.int64), bit_degree)
    slot_bit = edge_bit[permutation]
    _check_instance(layout, bit_degree, bit_block, slot_bit)
    sym_is_parity, sym_step, sym_bit, sym_block = _symbol_maps(layout, slot_bit, bit_block)
    for arr in (bit_degree, bit_block, slot_bit, permutation,
                sym_is_parity, sym_step, sym_bit, sym_block):
        arr.flags.writeable = False
    return CodeInstance(
        profile=profile, layout=layout, trellis=trellis,
        seed=int(payload["seed"]), bit_degree=bit_degree, bit_block=bit_block,
        slot_bit=slot_bit, permutation=permutation,
        achieved_spread=int(payload["achieved_spread"]),
        sym_is_parity=sym_is_parity, sym_step=sym_step,
        sym_bit=sym_bit, sym_block=sym_block,
    )
