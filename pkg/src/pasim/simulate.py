"""End-to-end PAS link over AWGN and the linear-regime AIR estimator.

Random streams are keyed by ``(seed, purpose, codeword index)`` so a point
gives the same numbers however its codewords are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .ccdm import CcdmCodec
from .channel import ChannelConfig, demap, noise_rng, transmit
from .constellation import AmplitudeAlphabet, AmplitudeDistribution, SymbolMap, entropy
from .ess import EssCodec
from .fec_ldpc import ParityCheck, dvbs2_code
from .metrics import DIMS_PER_4D, SimRecord, conditional_entropies, label_entropy
from .pas_frame import (
    PasFrameLayout, UniformShaper, codeword_llrs, frame_bits, labels_to_levels, labels_to_symbols,
    net_rate, pas_decode, plan_frame,
)

__all__ = [
    "SCHEMES",
    "TABLE1",
    "PasSystem",
    "dm_input_bits",
    "make_shaper",
    "build_system",
    "simulate_point",
    "air_point",
    "threshold_snr",
]

SCHEMES = ("uniform", "ccdm", "ess")
CODEWORD_LEN = 64800
_SOURCE, _SIGNS = 1, 2

# name -> (scheme, blocklength, FEC rate); all target 9 bit/4D
TABLE1 = {
    "uniform": ("uniform", 1, Fraction(3, 4)),
    "ccdm-200": ("ccdm", 200, Fraction(4, 5)),
    "ccdm-3600": ("ccdm", 3600, Fraction(4, 5)),
    "ess-200": ("ess", 200, Fraction(4, 5)),
}


def dm_input_bits(n: int, fec_rate, target_net_rate_4d, alphabet: AmplitudeAlphabet) -> int:
    """``k`` solving ``4 k/n + 4 (1 - (1 - c) m) = target``; must be an integer."""
    c = Fraction(fec_rate)
    m = alphabet.bits_per_dimension
    k = n * (Fraction(target_net_rate_4d) / 4 - (1 - (1 - c) * m))
    if k.denominator != 1 or k < 0:
        raise ValueError(
            f"net rate {target_net_rate_4d} bit/4D with n={n}, c={c} needs non-integer k={k}"
        )
    return int(k)


@lru_cache(maxsize=None)
def make_shaper(scheme: str, n: int, k: int, levels: int = 4):
    alphabet = AmplitudeAlphabet.pam(levels)
    if scheme == "ess":
        return EssCodec.for_rate(n, alphabet, k)
    if scheme == "ccdm":
        return CcdmCodec.for_rate(n, alphabet, k)
    if scheme == "uniform":
        if (n, k) != (1, alphabet.bits_per_amplitude):
            raise ValueError(f"uniform signalling uses n=1, k={alphabet.bits_per_amplitude}")
        return UniformShaper(alphabet)
    raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


@dataclass(frozen=True)
class PasSystem:
    scheme: str
    layout: PasFrameLayout
    shaper: object
    fec: ParityCheck
    priors: AmplitudeDistribution

    @property
    def symbol_map(self) -> SymbolMap:
        return SymbolMap(self.priors)

    @property
    def rate_loss(self) -> float:
        """Bits per amplitude."""
        return max(entropy(self.priors) - self.layout.dm_input_bits / self.layout.dm_blocklength, 0.0)

    @property
    def net_rate(self) -> Fraction:
        return net_rate(self.layout)


@lru_cache(maxsize=None)
def build_system(scheme: str, n: int, fec_rate, target_net_rate_4d=9, levels: int = 4) -> PasSystem:
    alphabet = AmplitudeAlphabet.pam(levels)
    c = Fraction(fec_rate)
    if scheme == "uniform":
        n = 1
        k = alphabet.bits_per_amplitude
        got = net_rate(plan_frame(CODEWORD_LEN, c, alphabet, 1, k))
        if got != Fraction(target_net_rate_4d):
            raise ValueError(f"uniform signalling at c={c} carries {got} bit/4D, not {target_net_rate_4d}")
    else:
        k = dm_input_bits(n, c, target_net_rate_4d, alphabet)
    layout = plan_frame(CODEWORD_LEN, c, alphabet, n, k)
    shaper = make_shaper(scheme, n, k, levels)
    return PasSystem(scheme, layout, shaper, dvbs2_code(c), shaper.amplitude_distribution())


def table1_system(name: str) -> PasSystem:
    scheme, n, c = TABLE1[name]
    return build_system(scheme, n, c, 9)


@dataclass
class _Tally:
    """Mergeable per-point statistics."""

    label_bits: int = 0
    pre_errors: int = 0
    info_bits: int = 0
    post_errors: int = 0
    source_bits: int = 0
    source_errors: int = 0
    dims: int = 0
    cond_sum: float = 0.0
    xy: complex = 0j
    xx: float = 0.0
    yy: float = 0.0
    codewords: int = 0
    dm_failures: int = 0

    def merge(self, other: "_Tally") -> "_Tally":
        for name in self.__dataclass_fields__:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        return self


def _codeword_stats(system: PasSystem, snr_db: float, seed: int, index: int) -> _Tally:
    lay = system.layout
    src = noise_rng(seed, _SOURCE, index).integers(0, 2, lay.source_bits_per_codeword, dtype=np.uint8)
    codeword, labels = frame_bits(lay, system.shaper, system.fec, src)
    x = labels_to_symbols(labels, system.symbol_map)
    cfg = ChannelConfig(snr_db, seed)
    y = transmit(x, cfg, stream=index)
    label_llrs = demap(y, cfg, system.priors)
    llrs = codeword_llrs(lay, system.fec, label_llrs)
    res = pas_decode(lay, system.shaper, system.fec, llrs)
    info_pos = system.fec.info_positions
    cond = conditional_entropies(label_llrs, labels)
    return _Tally(
        label_bits=lay.codeword_len,
        pre_errors=int(np.count_nonzero((llrs < 0) != codeword.astype(bool))),
        info_bits=info_pos.size,
        post_errors=int(np.count_nonzero(res.codeword_bits[info_pos] != codeword[info_pos])),
        source_bits=src.size,
        source_errors=int(np.count_nonzero(res.decoded_source_bits != src)),
        dims=labels.shape[0],
        cond_sum=float(np.sum(cond)) * labels.shape[0],
        xy=complex(np.vdot(x, y)),
        xx=float(np.vdot(x, x).real),
        yy=float(np.vdot(y, y).real),
        codewords=1,
        dm_failures=res.dm_failures,
    )


def _codeword_task(args):
    key, snr_db, seed, index = args
    return _codeword_stats(build_system(*key), snr_db, seed, index)


def _record(system: PasSystem, snr_db: float, t: _Tally) -> SimRecord:
    h_a = entropy(system.priors)
    lay = system.layout
    bmd = max(label_entropy(system.priors) - t.cond_sum / t.dims, 0.0) * DIMS_PER_4D
    loss = DIMS_PER_4D * max(h_a - lay.dm_input_bits / lay.dm_blocklength, 0.0)
    dist = t.yy - abs(t.xy) ** 2 / t.xx
    eff = 100.0 if dist <= 0 else min(10 * np.log10(abs(t.xy) ** 2 / (t.xx * dist)), 100.0)
    return SimRecord(
        snr_db=float(snr_db),
        ber_pre_fec=t.pre_errors / t.label_bits,
        ber_post_fec=t.post_errors / t.info_bits,
        ber_post_shaping=t.source_errors / t.source_bits,
        bmd_rate_4d=bmd,
        rate_loss_4d=loss,
        air_n_4d=bmd - loss,
        effective_snr_db=float(eff),
        blocks=t.codewords,
    )


def simulate_point(system: PasSystem, snr_db: float, codewords: int = 20, seed: int = 0,
                   workers: int = 1, key=None) -> SimRecord:
    """Run ``codewords`` PAS codewords through AWGN at ``snr_db``.

    ``workers > 1`` needs ``key``, the ``build_system`` arguments, so that
    worker processes can rebuild the system.
    """
    tally = _Tally()
    if workers > 1 and key is not None:
        tasks = [(key, snr_db, seed, i) for i in range(codewords)]
        with ProcessPoolExecutor(workers) as pool:
            for part in pool.map(_codeword_task, tasks):
                tally.merge(part)
    else:
        for i in range(codewords):
            tally.merge(_codeword_stats(system, snr_db, seed, i))
    return _record(system, snr_db, tally)


def shaped_levels(shaper, num_blocks: int, rng: np.random.Generator) -> np.ndarray:
    """Level indices of ``num_blocks`` DM blocks fed with uniform random bits."""
    bits = rng.integers(0, 2, (num_blocks, shaper.k), dtype=np.uint8)
    if isinstance(shaper, UniformShaper):
        return labels_to_levels(shaper.alphabet, bits)
    return np.concatenate([shaper.encode_levels(b) for b in bits])


def air_point(shaper, snr_db, num_amplitudes: int = 2_000_000, seed: int = 0,
              levels: np.ndarray | None = None):
    """BMD rate, rate loss and AIR_n (bits/4D) without the LDPC code.

    Amplitudes come from the actual DM fed with random bits; signs are
    uniform.  Pass ``levels`` to reuse one amplitude stream over a sweep.
    ``snr_db`` may be a scalar or a sequence; returns a list of
    ``(snr_db, bmd_4d, rate_loss_4d, air_4d)``.
    """
    priors = shaper.amplitude_distribution()
    if levels is None:
        blocks = -(-num_amplitudes // shaper.n)
        levels = shaped_levels(shaper, blocks, noise_rng(seed, _SOURCE))
    if levels.size % 2:
        levels = levels[:-1]
    signs = noise_rng(seed, _SIGNS).integers(0, 2, levels.size)
    smap = SymbolMap(priors)
    x = smap.modulate(signs, levels)
    labels = np.concatenate([signs[:, None], shaper.alphabet.label_matrix()[levels]], axis=1)
    h_a = entropy(priors)
    loss = DIMS_PER_4D * max(h_a - shaper.k / shaper.n, 0.0)
    out = []
    for snr in np.atleast_1d(snr_db):
        cfg = ChannelConfig(float(snr), seed)
        y = transmit(x, cfg, stream=0)
        cond = conditional_entropies(demap(y, cfg, priors), labels)
        bmd = max(label_entropy(priors) - float(np.sum(cond)), 0.0) * DIMS_PER_4D
        out.append((float(snr), bmd, loss, bmd - loss))
    return out


def threshold_snr(system: PasSystem, lo: float, hi: float, step: float = 0.1,
                  codewords: int = 100, seed: int = 0, threshold: float = 4.5e-3,
                  log=None) -> tuple[float, dict]:
    """Smallest grid SNR whose post-shaping BER is below ``threshold``.

    Bisection over the grid ``lo, lo+step, ..., hi``; assumes the BER falls
    with SNR.  Returns ``(snr_star, {snr: record})``.
    """
    grid = np.round(np.arange(lo, hi + step / 2, step), 6)
    seen = {}

    def passes(i):
        snr = float(grid[i])
        if snr not in seen:
            seen[snr] = simulate_point(system, snr, codewords, seed)
            if log:
                print(f"{system.scheme}-{system.layout.dm_blocklength} {snr:.2f} dB "
                      f"post-shaping BER {seen[snr].ber_post_shaping:.3e}", file=log)
        return seen[snr].ber_post_shaping < threshold

    a, b = 0, len(grid) - 1
    if not passes(b):
        raise ValueError(f"BER threshold not reached by {grid[b]} dB")
    if passes(a):
        raise ValueError(f"BER threshold already met at {grid[a]} dB; lower the search start")
    while b - a > 1:
        mid = (a + b) // 2
        if passes(mid):
            b = mid
        else:
            a = mid
    return float(grid[b]), seen

