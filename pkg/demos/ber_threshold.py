"""End-to-end PAS over AWGN: post-shaping BER around the HD-FEC threshold.

A handful of codewords per point keeps this quick; the acceptance suite
repeats the search with 100 codewords per point.
"""

from pasim.metrics import HD_FEC_THRESHOLD
from pasim.simulate import simulate_point, table1_system

for name in ["uniform", "ccdm-200", "ess-200"]:
    system = table1_system(name)
    print(name)
    for snr in (14.0, 14.4, 14.8, 15.2):
        rec = simulate_point(system, snr, codewords=4, seed=2)
        flag = "below" if rec.ber_post_shaping < HD_FEC_THRESHOLD else "above"
        print(f"  {snr:4.1f} dB  pre-FEC {rec.ber_pre_fec:.3e}  post-shaping {rec.ber_post_shaping:.3e} "
              f"({flag} threshold)  AIR_n {rec.air_n_4d:.3f}")
