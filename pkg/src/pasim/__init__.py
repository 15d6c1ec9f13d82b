"""Probabilistic amplitude shaping toolkit.

Exact enumerative sphere shaping (:mod:`pasim.ess`) and constant composition
distribution matching (:mod:`pasim.ccdm`) inside a PAS frame with the
DVB-S2 LDPC codes, an AWGN channel with prior-aware soft demapping, and
finite-length rate metrics.
"""

from .ccdm import CcdmCodec, Composition, multinomial, select_composition
from .channel import ChannelConfig, demap, effective_snr, transmit
from .constellation import (
    AmplitudeAlphabet, AmplitudeDistribution, SymbolMap, amplitude_bits, bits_to_amplitude,
    entropy, mb_distribution, mb_for_entropy,
)
from .errors import (
    CompositionViolationError, OutsideSphereError, ParityCheckParseError, ShapingError,
    UnaddressedSequenceError,
)
from .ess import EssCodec, EssTrellis, build_trellis, induced_distribution, select_emax
from .fec_ldpc import ParityCheck, dvbs2_code, load_parity_check
from .metrics import SimRecord, air_n, ber, bmd_rate, hd_fec_pass, rate_loss
from .pas_frame import PasFrameLayout, UniformShaper, net_rate, pas_decode, pas_encode, plan_frame

__version__ = "0.1.0"
