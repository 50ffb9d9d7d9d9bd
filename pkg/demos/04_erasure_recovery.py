"""
Full diversity as an erasure test
=================================

On a 2-block channel a full-diversity code survives the complete loss of
either block. The multiplexer earns that property by construction; the
audit feeds the decoder one noiseless block and one erased block and
demands perfect recovery both ways. A sabotaged multiplexer that parks a
transition's systematic and parity bits on the same block fails at once.
"""
from turbofade import (
    build_code,
    run_erasure_audit,
    sabotage_multiplexer,
    validate_profile,
)

profile = validate_profile({2: 0.9, 12: 0.1})
code = build_code(profile, k=1200, seed=5)

report = run_erasure_audit(code, trials=25, seed=3)
print(f"well-formed multiplexer: {report.trials} trials x 2 orientations, "
      f"{len(report.failures)} failures")

broken = sabotage_multiplexer(code)
report = run_erasure_audit(broken, trials=5, seed=3)
print(f"sabotaged multiplexer:   {report.trials} trials x 2 orientations, "
      f"{len(report.failures)} failures")
for failure in report.failures[:3]:
    print(f"  trial {failure.trial}, block {failure.erased_block} erased: "
          f"{failure.bit_mismatches} wrong bits")
