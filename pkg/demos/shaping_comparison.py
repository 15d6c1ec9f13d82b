"""Compare ESS and CCDM matchers at the 9 bit/4D operating point.

Both matchers take k = 370 bits per block of n = 200 amplitudes.  ESS spends
that budget inside an energy sphere, CCDM on one composition shell, and the
difference shows up as rate loss.
"""

import numpy as np

from pasim import AmplitudeAlphabet, entropy
from pasim.simulate import make_shaper

alphabet = AmplitudeAlphabet.pam(4)

for scheme, n, k in [("ess", 200, 370), ("ccdm", 200, 370), ("ccdm", 3600, 6660)]:
    shaper = make_shaper(scheme, n, k)
    dist = shaper.amplitude_distribution()
    h = entropy(dist)
    print(f"{scheme.upper()}-{n}: H(A) = {h:.4f} bit, rate loss = {h - k / n:.4f} bit/amp, "
          f"E[a^2] = {dist.mean_energy():.3f}")
    print("    P(a) =", np.round(dist.as_array(), 4))

# one block through the ESS matcher and back
ess = make_shaper("ess", 200, 370)
bits = np.random.default_rng(0).integers(0, 2, 370)
amps = ess.encode(bits)
print("\nfirst 20 ESS amplitudes:", amps[:20])
print("block energy", int(np.sum(amps**2)), "<= bound", ess.e_max)
print("decoded bits match:", np.array_equal(ess.decode(amps), bits))
