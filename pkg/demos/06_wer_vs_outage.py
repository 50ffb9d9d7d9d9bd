"""
Word error rate against the outage limit
========================================

The information outage probability lower-bounds the word error rate of
any coding scheme on the quasi-static channel. A small-K sweep already
tracks the outage curve at a roughly constant gap; the full-scale runs
(K=6000, 100 word errors per point) close most of that gap.
"""
from turbofade import (
    StopRule,
    build_code,
    outage_probability_bpsk,
    run_wer_sweep,
    validate_profile,
)

profile = validate_profile({2: 0.9, 12: 0.1})
code = build_code(profile, k=1200, seed=5)

grid = [6.0, 8.0, 10.0, 12.0]
sweep = run_wer_sweep(code, grid, mode="fading",
                      stop=StopRule(min_word_errors=30, max_frames=1500),
                      seed=7)

print("Eb/N0    P_out      WER        frames")
for row in sweep.rows:
    outage = outage_probability_bpsk(row.ebn0_db, samples=200_000, seed=7)
    print(f"{row.ebn0_db:4.1f}   {outage.probability:.2e}   {row.wer:.2e}"
          f"   {row.frames}")
