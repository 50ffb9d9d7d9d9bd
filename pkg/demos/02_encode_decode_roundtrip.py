"""
Encode, transmit, decode
========================

One complete pass through the chain at small block length: sample a code
instance, push a frame through the quasi-static fading channel, and run
the iterative decoder.
"""
import numpy as np

from turbofade import (
    build_code,
    channel_llr,
    decode_frame,
    ebn0_db_to_noise_variance,
    encode_frame,
    in_outage,
    modulate_bpsk,
    rayleigh_gains,
    transmit,
    validate_profile,
)

profile = validate_profile({2: 0.9, 12: 0.1})
code = build_code(profile, k=1200, seed=5)
print(f"K = {code.k} information bits, frame {code.frame_length} symbols, "
      f"interleaver spread {code.achieved_spread}")

rng = np.random.default_rng(17)
noise_variance = ebn0_db_to_noise_variance(6.0, 0.5)
block_index = code.sym_block.astype(np.int64) - 1

# frames whose fading pair lands inside the information outage region are
# expected to fail; no code of any length can save them
for trial in range(5):
    bits = rng.integers(0, 2, code.k, dtype=np.int8)
    gains = rayleigh_gains(rng)
    observed = transmit(modulate_bpsk(encode_frame(code, bits)),
                        block_index, gains, noise_variance, rng)
    result = decode_frame(code, channel_llr(observed, block_index, gains,
                                            noise_variance))
    errors = int(np.count_nonzero(result.bits != bits))
    tag = "in outage" if in_outage(gains, noise_variance, 0.5) else "decodable"
    print(f"gains ({gains[0]:.2f}, {gains[1]:.2f})  {tag:9s}  "
          f"iterations {result.iterations:2d}  bit errors {errors}")
