"""
Ensemble algebra: from a degree profile to code parameters
==========================================================

Every code in this workbench starts from a degree profile: which fraction
of information bits is repeated how many times. The profile fixes the
interleaver length, how much parity the single RSC must drop to hit the
target rate, and how the virtual constituent segments are punctured.
"""
from turbofade import derive_code_params, singleton_diversity, validate_profile

profiles = {
    "regular": {2: 1.0},
    "irregular d=3": {2: 0.9, 12: 0.1},
    "irregular d=2.727": {2: 0.9273, 12: 0.0727},
    "threshold-optimized": {2: 0.9, 9: 0.04, 15: 0.06},
}

for name, mapping in profiles.items():
    profile = validate_profile(mapping)
    params = derive_code_params(profile)
    print(f"--- {name}")
    print(f"  mean degree            {float(params.average_degree):.4g}")
    print(f"  parity kept            {1 - float(params.puncture_fraction):.4g}")
    print(f"  segments               {params.segment_count}")
    print(f"  segment puncture share {float(params.segment_puncture_fraction):.4g}")

# the 2-block Singleton bound says diversity 2 is the best any rate-1/2
# code can do, and that it is actually reachable
report = singleton_diversity(2, "1/2")
print(f"\nSingleton bound at rate 1/2 over 2 blocks: {report.singleton_bound}"
      f" (full diversity possible: {report.full_diversity_possible})")
