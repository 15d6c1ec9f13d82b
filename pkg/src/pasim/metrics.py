"""Rate loss, bit-metric decoding rate, finite-length AIR and BER bookkeeping.

Rates carrying a ``_4d`` suffix are in bits per 4D symbol (two complex
symbols, four real dimensions).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .constellation import AmplitudeDistribution, entropy

__all__ = [
    "HD_FEC_THRESHOLD",
    "SimRecord",
    "rate_loss",
    "label_entropy",
    "conditional_entropies",
    "bmd_rate",
    "air_n",
    "ber",
    "hd_fec_pass",
]

HD_FEC_THRESHOLD = 4.5e-3
DIMS_PER_4D = 4


@dataclass(frozen=True)
class SimRecord:
    snr_db: float
    ber_pre_fec: float
    ber_post_fec: float
    ber_post_shaping: float
    bmd_rate_4d: float
    rate_loss_4d: float
    air_n_4d: float
    effective_snr_db: float
    blocks: int

    def __post_init__(self):
        for name in ("ber_pre_fec", "ber_post_fec", "ber_post_shaping"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if abs(self.air_n_4d - (self.bmd_rate_4d - self.rate_loss_4d)) > 1e-12:
            raise ValueError("air_n_4d must equal bmd_rate_4d - rate_loss_4d")

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


def rate_loss(h_a: float, k: int, n: int) -> float:
    """``H(A) - k/n`` in bits per amplitude."""
    loss = h_a - k / n
    if loss < -1e-12:
        raise ValueError(f"negative rate loss {loss}: k/n={k / n} exceeds H(A)={h_a}")
    return max(loss, 0.0)


def label_entropy(priors: AmplitudeDistribution) -> float:
    """Entropy of one 1D label (uniform sign plus amplitude) in bits."""
    return 1.0 + entropy(priors)


def conditional_entropies(llrs, sent_bits) -> np.ndarray:
    """Per bit level estimate of ``H(C_i | Y)`` from matched LLRs."""
    L = np.asarray(llrs, dtype=float)
    c = np.asarray(sent_bits)
    if L.shape != c.shape:
        raise ValueError(f"length mismatch: LLRs {L.shape} vs bits {c.shape}")
    s = 1.0 - 2.0 * c.astype(float)
    # log2(1 + exp(-s L)) without overflow
    return np.mean(np.logaddexp(0.0, -s * L), axis=0) / np.log(2.0)


def bmd_rate(llrs, sent_bits, priors: AmplitudeDistribution) -> float:
    """BMD rate ``H(C) - sum_i H(C_i|Y)`` in bits/4D, clamped at zero.

    ``llrs`` and ``sent_bits`` have shape ``(num_1d_symbols, m)``.  ``H(C)`` is
    the entropy of the whole 1D label: one uniform sign bit plus ``H(A)``.
    """
    cond = conditional_entropies(llrs, sent_bits)
    if np.ndim(cond) == 0:
        raise ValueError("llrs must be a 2D array (symbols, bit levels)")
    per_dim = label_entropy(priors) - float(np.sum(cond))
    return max(per_dim, 0.0) * DIMS_PER_4D


def air_n(bmd_rate_4d: float, h_a: float, k: int, n: int) -> float:
    return bmd_rate_4d - DIMS_PER_4D * (h_a - k / n)


def ber(measured_bits, reference_bits) -> float:
    a = np.asarray(measured_bits).ravel()
    b = np.asarray(reference_bits).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("empty bit streams")
    return float(np.count_nonzero(a != b)) / a.size


def hd_fec_pass(ber_value: float, threshold: float = HD_FEC_THRESHOLD) -> bool:
    """Whether the outer hard-decision code would clean this BER (strict)."""
    return ber_value < threshold
