"""Finite-length AIR versus SNR over AWGN, no FEC in the loop.

AIR_n is the bit-metric decoding rate minus the matcher's rate loss.  The
shaped schemes carry 9 bit/4D after a rate-4/5 code, so their AIR_n cannot
exceed 4 (1 + k/n) however high the SNR.
"""

import numpy as np

from pasim.simulate import air_point, table1_system

snrs = np.arange(8.0, 22.1, 2.0)
names = ["uniform", "ccdm-200", "ess-200", "ccdm-3600"]
table = {name: air_point(table1_system(name).shaper, snrs, num_amplitudes=400_000, seed=1)
         for name in names}

print("SNR dB  " + "  ".join(f"{n:>10s}" for n in names))
for i, snr in enumerate(snrs):
    print(f"{snr:6.1f}  " + "  ".join(f"{table[n][i][3]:10.3f}" for n in names))
