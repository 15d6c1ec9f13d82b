"""PAS framing: distribution matcher blocks, systematic LDPC and sign bits.

Codeword bit layout (one LDPC codeword, ``N = codeword_len / m`` real
dimensions, ``m`` label bits per dimension):

* information word = ``N * (m - 1)`` amplitude label bits followed by
  ``gamma`` uniform sign bits taken straight from the source;
* 1D symbol ``t`` carries amplitude label bits ``info[(m-1)t : (m-1)(t+1)]``;
* its sign bit is ``info[N(m-1) + t]`` for ``t < gamma`` and parity bit
  ``t - gamma`` otherwise;
* consecutive 1D symbols form one complex symbol (even -> I, odd -> Q).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constellation import AmplitudeAlphabet, AmplitudeDistribution, SymbolMap
from .errors import ShapingError
from .fec_ldpc import LLR_CLIP, ParityCheck, decode

__all__ = [
    "PasFrameLayout",
    "PasBlockResult",
    "UniformShaper",
    "plan_frame",
    "net_rate",
    "frame_bits",
    "pas_encode",
    "codeword_llrs",
    "pas_decode",
    "MAX_ITER",
]

MAX_ITER = 50


@dataclass(frozen=True)
class PasFrameLayout:
    codeword_len: int
    fec_rate: Fraction
    bits_per_1d: int
    dm_blocklength: int
    dm_input_bits: int
    dm_blocks_per_codeword: int
    amplitudes_per_codeword: int
    amp_label_bits: int
    uniform_sign_info_bits: int
    parity_bits: int
    source_bits_per_codeword: int

    def __post_init__(self):
        c, m = self.fec_rate, self.bits_per_1d
        checks = {
            "amplitudes_per_codeword = codeword_len / m":
                self.amplitudes_per_codeword * m == self.codeword_len,
            "dm_blocks_per_codeword * n = amplitudes_per_codeword":
                self.dm_blocks_per_codeword * self.dm_blocklength == self.amplitudes_per_codeword,
            "amp_label_bits = amplitudes_per_codeword * (m - 1)":
                self.amp_label_bits == self.amplitudes_per_codeword * (m - 1),
            "amp_label_bits + uniform_sign_info_bits = c * codeword_len":
                self.amp_label_bits + self.uniform_sign_info_bits == c * self.codeword_len,
            "uniform_sign_info_bits + parity_bits = amplitudes_per_codeword":
                self.uniform_sign_info_bits + self.parity_bits == self.amplitudes_per_codeword,
            "parity_bits = (1 - c) * codeword_len":
                self.parity_bits == (1 - c) * self.codeword_len,
            "(1 - c) * m <= 1": (1 - c) * m <= 1,
            "source_bits = dm_blocks * k + uniform_sign_info_bits":
                self.source_bits_per_codeword
                == self.dm_blocks_per_codeword * self.dm_input_bits + self.uniform_sign_info_bits,
        }
        for identity, ok in checks.items():
            if not ok:
                raise ValueError(f"frame layout violates {identity}")

    @property
    def info_bits(self) -> int:
        return self.amp_label_bits + self.uniform_sign_info_bits

    @property
    def symbols_per_codeword(self) -> int:
        """Complex (2D) symbols per codeword."""
        return self.amplitudes_per_codeword // 2

    @property
    def shaped_bits(self) -> int:
        return self.dm_blocks_per_codeword * self.dm_input_bits


def plan_frame(codeword_len: int, fec_rate, alphabet: AmplitudeAlphabet, n: int, k: int) -> PasFrameLayout:
    """Bit budget for one codeword; ``n=1, k=m-1`` describes uniform signalling."""
    c = Fraction(fec_rate)
    m = alphabet.bits_per_dimension
    if codeword_len % m:
        raise ValueError(f"codeword_len {codeword_len} not divisible by m={m} bits per 1D symbol")
    if (c * codeword_len).denominator != 1:
        raise ValueError(f"c * codeword_len = {c * codeword_len} is not an integer")
    if (1 - c) * m > 1:
        raise ValueError(f"infeasible: (1 - c) * m = {(1 - c) * m} > 1, parity exceeds sign positions")
    amps = codeword_len // m
    if amps % n:
        raise ValueError(f"amplitudes_per_codeword {amps} not divisible by DM blocklength n={n}")
    if not 0 <= k <= n * (m - 1):
        raise ValueError(f"k={k} outside 0..{n * (m - 1)}")
    blocks = amps // n
    parity = int((1 - c) * codeword_len)
    gamma = amps - parity
    return PasFrameLayout(
        codeword_len=codeword_len,
        fec_rate=c,
        bits_per_1d=m,
        dm_blocklength=n,
        dm_input_bits=k,
        dm_blocks_per_codeword=blocks,
        amplitudes_per_codeword=amps,
        amp_label_bits=amps * (m - 1),
        uniform_sign_info_bits=gamma,
        parity_bits=parity,
        source_bits_per_codeword=blocks * k + gamma,
    )


def net_rate(layout: PasFrameLayout) -> Fraction:
    """Information bits per 4D symbol, exact."""
    c, m = layout.fec_rate, layout.bits_per_1d
    return 4 * Fraction(layout.dm_input_bits, layout.dm_blocklength) + 4 * (1 - (1 - c) * m)


@dataclass(frozen=True)
class UniformShaper:
    """Identity shaper: every ``m-1`` source bits are one amplitude label."""

    alphabet: AmplitudeAlphabet
    n: int = field(default=1, init=False)

    @property
    def k(self) -> int:
        return self.alphabet.bits_per_amplitude

    def amplitude_distribution(self) -> AmplitudeDistribution:
        return AmplitudeDistribution.uniform(self.alphabet)

    def encode_levels(self, bits) -> np.ndarray:
        return labels_to_levels(self.alphabet, np.asarray(bits, np.uint8).reshape(1, -1))

    def decode_levels(self, level_indices, clip: bool = False) -> np.ndarray:
        return self.alphabet.label_matrix()[np.asarray(level_indices)].ravel()


def labels_to_levels(alphabet: AmplitudeAlphabet, labels: np.ndarray) -> np.ndarray:
    w = 1 << np.arange(labels.shape[1] - 1, -1, -1)
    return alphabet.label_to_index_table()[labels.astype(np.int64) @ w]


def _check_shaper(layout: PasFrameLayout, shaper, fec: ParityCheck):
    if shaper.n != layout.dm_blocklength or shaper.k != layout.dm_input_bits:
        raise ValueError(
            f"shaper (n={shaper.n}, k={shaper.k}) does not match layout "
            f"(n={layout.dm_blocklength}, k={layout.dm_input_bits})"
        )
    if fec.n_bits != layout.codeword_len or fec.k != layout.info_bits:
        raise ValueError(
            f"code (n={fec.n_bits}, k={fec.k}) does not match layout "
            f"(n={layout.codeword_len}, k={layout.info_bits})"
        )


def _shape_levels(layout: PasFrameLayout, shaper, shaped_bits: np.ndarray) -> np.ndarray:
    rows = shaped_bits.reshape(layout.dm_blocks_per_codeword, layout.dm_input_bits)
    if isinstance(shaper, UniformShaper):
        return labels_to_levels(shaper.alphabet, rows)
    return np.concatenate([shaper.encode_levels(r) for r in rows])


def frame_bits(layout: PasFrameLayout, shaper, fec: ParityCheck, source_bits):
    """Encode one codeword worth of source bits.

    Returns ``(codeword, labels)`` with ``labels`` of shape
    ``(amplitudes_per_codeword, m)``, sign bit first.
    """
    _check_shaper(layout, shaper, fec)
    src = np.asarray(source_bits, dtype=np.uint8).ravel()
    if src.size != layout.source_bits_per_codeword:
        raise ValueError(f"expected {layout.source_bits_per_codeword} source bits, got {src.size}")
    alph = shaper.alphabet
    levels = _shape_levels(layout, shaper, src[: layout.shaped_bits])
    amp_labels = alph.label_matrix()[levels]
    info = np.concatenate([amp_labels.ravel(), src[layout.shaped_bits:]])
    codeword = fec.encode(info)
    signs = np.concatenate([src[layout.shaped_bits:], codeword[fec.parity_positions]])
    labels = np.concatenate([signs[:, None], amp_labels], axis=1)
    return codeword, labels


def labels_to_symbols(labels: np.ndarray, symbol_map: SymbolMap) -> np.ndarray:
    levels = labels_to_levels(symbol_map.alphabet, labels[:, 1:])
    return symbol_map.modulate(labels[:, 0], levels)


def pas_encode(layout: PasFrameLayout, shaper, fec: ParityCheck, source_bits,
               symbol_map: SymbolMap | None = None) -> np.ndarray:
    """Complex symbols of one codeword, scaled to unit mean energy."""
    if symbol_map is None:
        symbol_map = SymbolMap(shaper.amplitude_distribution())
    _, labels = frame_bits(layout, shaper, fec, source_bits)
    return labels_to_symbols(labels, symbol_map)


def codeword_llrs(layout: PasFrameLayout, fec: ParityCheck, label_llrs) -> np.ndarray:
    """Reorder demapper output ``(amplitudes, m)`` into codeword bit order."""
    L = np.asarray(label_llrs, dtype=float)
    if L.shape != (layout.amplitudes_per_codeword, layout.bits_per_1d):
        raise ValueError(f"expected LLRs of shape {(layout.amplitudes_per_codeword, layout.bits_per_1d)}, got {L.shape}")
    out = np.empty(layout.codeword_len)
    info = fec.info_positions
    a = layout.amp_label_bits
    out[info[:a]] = L[:, 1:].ravel()
    out[info[a:]] = L[: layout.uniform_sign_info_bits, 0]
    out[fec.parity_positions] = L[layout.uniform_sign_info_bits:, 0]
    return out


def codeword_labels(layout: PasFrameLayout, fec: ParityCheck, codeword) -> np.ndarray:
    """Inverse of :func:`codeword_llrs` for hard bits."""
    cw = np.asarray(codeword)
    info = cw[fec.info_positions]
    a = layout.amp_label_bits
    signs = np.concatenate([info[a:], cw[fec.parity_positions]])
    amps = info[:a].reshape(layout.amplitudes_per_codeword, layout.bits_per_1d - 1)
    return np.concatenate([signs[:, None], amps], axis=1)


@dataclass(frozen=True)
class PasBlockResult:
    decoded_source_bits: np.ndarray
    dm_failures: int
    fec_converged: bool
    codeword_bits: np.ndarray = field(repr=False, default=None)
    iterations: int = 0


def pas_decode(layout: PasFrameLayout, shaper, fec: ParityCheck, llrs,
               max_iter: int = MAX_ITER) -> PasBlockResult:
    """LDPC decoding followed by inverse shaping of every DM block.

    A DM block that cannot be inverted (energy above the bound, wrong
    composition, rank outside the codebook) is recovered by clipped ranking
    and counted in ``dm_failures``.
    """
    _check_shaper(layout, shaper, fec)
    L = np.asarray(llrs, dtype=float).ravel()
    if L.size != layout.codeword_len:
        raise ValueError(f"expected {layout.codeword_len} LLRs, got {L.size}")
    L = np.clip(L, -LLR_CLIP, LLR_CLIP)
    cw, converged, its = decode(fec, L, max_iter, return_iterations=True)
    info = cw[fec.info_positions]
    amp_bits = info[: layout.amp_label_bits].reshape(-1, layout.bits_per_1d - 1)
    failures = 0
    if isinstance(shaper, UniformShaper):
        shaped = amp_bits.ravel()
    else:
        levels = labels_to_levels(shaper.alphabet, amp_bits).reshape(
            layout.dm_blocks_per_codeword, layout.dm_blocklength
        )
        parts = []
        for row in levels:
            try:
                parts.append(shaper.decode_levels(row))
            except ShapingError:
                failures += 1
                parts.append(shaper.decode_levels(row, clip=True))
        shaped = np.concatenate(parts) if parts else np.zeros(0, np.uint8)
    source = np.concatenate([shaped.astype(np.uint8), info[layout.amp_label_bits:]])
    return PasBlockResult(source, failures, converged, cw, its)

