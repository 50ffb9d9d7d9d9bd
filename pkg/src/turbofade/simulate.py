"""Finite-length Monte Carlo on built code instances.

Frames are independent: each draws its information bits, one Rayleigh gain
pair (quasi-static, redrawn per codeword) and its noise from a generator
seeded by (point_seed, frame_index), so any measurement row can be replayed
exactly from the seed stored in it, sequentially or split across workers.
The decoder's own stopping rule is the only early exit; decisions are
compared against the true bits after it has finished, never to cut it short.
"""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .channel import (
    channel_llr,
    ebn0_db_to_noise_variance,
    modulate_bpsk,
    rayleigh_gains,
    transmit,
)
from .codec import CodeInstance, decode_frame, encode_frame
from .ensemble import DegreeProfile
from .outage import wilson_half_width
from .trellis import DEFAULT_LLR_CAP

__all__ = [
    "StopRule",
    "PointResult",
    "SimResult",
    "simulate_point",
    "run_wer_sweep",
    "EraseFailure",
    "EraseReport",
    "run_erasure_audit",
    "sabotage_multiplexer",
]

_MODES = ("fading", "awgn")


@dataclass(frozen=True)
class StopRule:
    """Stop a measurement point at enough word errors or enough frames."""

    min_word_errors: int = 100
    max_frames: int = 1_000_000

    def __post_init__(self):
        if self.min_word_errors < 1:
            raise ValueError("min_word_errors must be positive")
        if self.max_frames < 1:
            raise ValueError("max_frames must be positive")


@dataclass(frozen=True)
class PointResult:
    """Counts and summary statistics for one Eb/N0 point."""

    ebn0_db: float
    frames: int
    word_errors: int
    bit_errors: int
    wer: float
    ber: float
    wer_ci95: float
    mean_iterations: float
    wall_seconds: float
    seed: int


@dataclass(frozen=True)
class SimResult:
    """One sweep: shared context plus per-point rows, append-only."""

    profile: DegreeProfile
    k: int
    mode: str
    stop: StopRule
    seed: int
    rows: tuple[PointResult, ...]


def simulate_point(code: CodeInstance, ebn0_db: float, mode: str = "fading",
                   stop: StopRule | None = None, seed: int = 0,
                   max_iters: int = 50) -> PointResult:
    """Measure WER/BER at a single operating point.

    Frame f derives its generator from SeedSequence((seed, f)); replaying
    with the same arguments reproduces the counts bit for bit.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    rule = stop or StopRule()
    noise_variance = ebn0_db_to_noise_variance(
        ebn0_db, float(code.layout.config.code_rate))
    block_index = code.sym_block.astype(np.int64) - 1
    unit_gains = np.ones(2)

    frames = word_errors = bit_errors = iter_total = 0
    t0 = time.perf_counter()
    while frames < rule.max_frames and word_errors < rule.min_word_errors:
        rng = np.random.default_rng(np.random.SeedSequence((seed, frames)))
        bits = rng.integers(0, 2, code.k, dtype=np.int8)
        gains = rayleigh_gains(rng) if mode == "fading" else unit_gains
        observed = transmit(modulate_bpsk(encode_frame(code, bits)),
                            block_index, gains, noise_variance, rng)
        llrs = channel_llr(observed, block_index, gains, noise_variance)
        outcome = decode_frame(code, llrs, max_iters=max_iters)
        mismatches = int(np.count_nonzero(outcome.bits != bits))
        frames += 1
        bit_errors += mismatches
        word_errors += mismatches > 0
        iter_total += outcome.iterations
    wall = time.perf_counter() - t0

    return PointResult(
        ebn0_db=float(ebn0_db),
        frames=frames,
        word_errors=word_errors,
        bit_errors=bit_errors,
        wer=word_errors / frames,
        ber=bit_errors / (frames * code.k),
        wer_ci95=wilson_half_width(word_errors, frames),
        mean_iterations=iter_total / frames,
        wall_seconds=wall,
        seed=seed,
    )


def run_wer_sweep(code: CodeInstance, ebn0_grid_db, mode: str = "fading",
                  stop: StopRule | None = None, seed: int = 0,
                  max_iters: int = 50) -> SimResult:
    """Sweep the stop-rule measurement over an Eb/N0 grid.

    Each point gets its own 64-bit seed derived from (seed, grid position)
    and stored in its row, so any row is replayable in isolation through
    simulate_point.
    """
    rule = stop or StopRule()
    grid = [float(db) for db in ebn0_grid_db]
    if not grid:
        raise ValueError("ebn0_grid_db must not be empty")
    rows = []
    for p, db in enumerate(grid):
        point_seed = int(np.random.SeedSequence((seed, p)).generate_state(
            1, np.uint64)[0])
        rows.append(simulate_point(code, db, mode, rule, point_seed,
                                   max_iters))
    return SimResult(profile=code.profile, k=code.k, mode=mode, stop=rule,
                     seed=seed, rows=tuple(rows))


@dataclass(frozen=True)
class EraseFailure:
    trial: int
    erased_block: int
    bit_mismatches: int
    frame_seed: int


@dataclass(frozen=True)
class EraseReport:
    """Single-block-erasure decoding audit over random frames."""

    trials: int
    failures: tuple[EraseFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def run_erasure_audit(code: CodeInstance, trials: int = 200, seed: int = 0,
                      llr_magnitude: float = DEFAULT_LLR_CAP,
                      max_iters: int = 50) -> EraseReport:
    """Erase each fading block in turn and decode from the survivor alone.

    The surviving block is read noiselessly (saturated LLRs), the erased one
    as exact zeros. A full-diversity multiplexer recovers every frame; each
    failure is reported with the trial's seed so the frame can be rebuilt.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    failures = []
    for t in range(trials):
        frame_seed = int(np.random.SeedSequence((seed, t)).generate_state(
            1, np.uint64)[0])
        rng = np.random.default_rng(frame_seed)
        bits = rng.integers(0, 2, code.k, dtype=np.int8)
        clean = llr_magnitude * modulate_bpsk(encode_frame(code, bits))
        for erased in (1, 2):
            llrs = np.where(code.sym_block == erased, 0.0, clean)
            outcome = decode_frame(code, llrs, max_iters=max_iters)
            mismatches = int(np.count_nonzero(outcome.bits != bits))
            if mismatches:
                failures.append(EraseFailure(t, erased, mismatches,
                                             frame_seed))
    return EraseReport(trials=trials, failures=tuple(failures))


def sabotage_multiplexer(code: CodeInstance) -> CodeInstance:
    """Negative control: move every parity symbol onto its own bit's block.

    Transitions then risk losing systematic and parity together when one
    block fades, which is exactly the failure mode the real multiplexer is
    built to rule out. The returned instance is only meant for audits; it
    abandons the equal-split invariant on purpose.
    """
    host_bit = code.slot_bit[code.sym_step]
    sym_block = np.where(code.sym_is_parity, code.bit_block[host_bit],
                         code.sym_block).astype(np.int8)
    sym_block.flags.writeable = False
    return dataclasses.replace(code, sym_block=sym_block)
