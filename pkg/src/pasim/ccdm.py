"""Constant composition distribution matching by exact multiset ranking.

Every output block is a permutation of one fixed multiset of amplitudes.  The
input integer is the lexicographic rank of the block among all distinct
permutations; ranking and unranking walk the block once, updating the number
of remaining permutations with one exact multiply/divide per position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import AmplitudeAlphabet, AmplitudeDistribution, mb_distribution
from .errors import CompositionViolationError, UnaddressedSequenceError
from .util import bits_to_int, int_to_bits

__all__ = [
    "Composition",
    "CcdmCodec",
    "multinomial",
    "quantize_distribution",
    "select_composition",
    "ccdm_encode",
    "ccdm_decode",
]


@dataclass(frozen=True)
class Composition:
    alphabet: AmplitudeAlphabet
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != len(self.alphabet):
            raise ValueError(f"need {len(self.alphabet)} counts, got {len(counts)}")
        if min(counts) < 0:
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def mean_energy(self) -> float:
        return sum(c * a * a for c, a in zip(self.counts, self.alphabet.levels)) / self.n

    def distribution(self) -> AmplitudeDistribution:
        return AmplitudeDistribution.from_counts(self.alphabet, self.counts)


def multinomial(composition: Composition) -> int:
    """Number of distinct sequences with the given composition."""
    return multinomial_counts(composition.counts)


def quantize_distribution(probs, n: int) -> tuple[int, ...]:
    """Largest-remainder rounding of ``n * probs`` to integers summing to ``n``."""
    target = np.asarray(probs, dtype=float) * n
    base = np.floor(target).astype(np.int64)
    short = n - int(base.sum())
    if short:
        rem = target - base
        # stable: ties go to the lower (cheaper) level
        order = sorted(range(len(rem)), key=lambda j: (-rem[j], j))
        for j in order[:short]:
            base[j] += 1
    return tuple(int(c) for c in base)


def _candidate_compositions(n: int, alphabet: AmplitudeAlphabet, lam_max: float = 64.0):
    def comp(lam):
        return quantize_distribution(mb_distribution(alphabet, lam).probs, n)

    seen = {}
    stack = [(0.0, comp(0.0), lam_max, comp(lam_max), 0)]
    while stack:
        lo, clo, hi, chi, depth = stack.pop()
        seen[clo] = None
        seen[chi] = None
        if clo == chi or depth > 60:
            continue
        if max(abs(a - b) for a, b in zip(clo, chi)) <= 1:
            continue
        mid = 0.5 * (lo + hi)
        cmid = comp(mid)
        stack.append((lo, clo, mid, cmid, depth + 1))
        stack.append((mid, cmid, hi, chi, depth + 1))
    return list(seen)


def _log2_size(counts) -> int:
    return multinomial_counts(counts).bit_length() - 1


def multinomial_counts(counts) -> int:
    # product of binomials keeps intermediates small compared to n!
    total, acc = 1, 0
    for c in counts:
        for i in range(1, c + 1):
            acc += 1
            total = total * acc // i
    return total


def _descend(counts: tuple[int, ...], energies, k_target: int) -> tuple[int, ...]:
    """Move single amplitudes to cheaper levels while the codebook stays large enough."""
    while True:
        moves = []
        for hi in range(len(counts) - 1, 0, -1):
            if not counts[hi]:
                continue
            for lo in range(hi):
                cand = list(counts)
                cand[hi] -= 1
                cand[lo] += 1
                moves.append((energies[lo] - energies[hi], tuple(cand)))
        for _, cand in sorted(moves):
            if _log2_size(cand) >= k_target:
                counts = cand
                break
        else:
            return counts


def select_composition(n: int, alphabet: AmplitudeAlphabet, k_target: int) -> Composition:
    """Lowest-energy composition addressing at least ``2**k_target`` blocks.

    The start point is the cheapest addressable largest-remainder quantization
    of a Maxwell-Boltzmann distribution; single-amplitude moves to lower levels
    are then applied while addressability holds, so the result is a local
    energy minimum.
    """
    if k_target < 0 or k_target > n * alphabet.bits_per_amplitude:
        raise ValueError(
            f"infeasible k_target={k_target} for n={n} and {len(alphabet)} levels"
        )
    energies = [a * a for a in alphabet.levels]
    best = None
    for counts in _candidate_compositions(n, alphabet):
        if _log2_size(counts) < k_target:
            continue
        key = (sum(x * e for x, e in zip(counts, energies)), counts)
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError(f"infeasible k_target={k_target}: no candidate composition is large enough")
    return Composition(alphabet, _descend(best[1], energies, k_target))


@dataclass(frozen=True)
class CcdmCodec:
    composition: Composition
    k: int = None

    def __post_init__(self):
        size = multinomial(self.composition)
        k = size.bit_length() - 1 if self.k is None else int(self.k)
        if k < 0 or (1 << k) > size:
            raise ValueError(f"k={k} exceeds the {size} available sequences")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "_size", size)

    @classmethod
    def for_rate(cls, n: int, alphabet: AmplitudeAlphabet, k: int) -> "CcdmCodec":
        return cls(select_composition(n, alphabet, k), k)

    @property
    def n(self) -> int:
        return self.composition.n

    @property
    def alphabet(self) -> AmplitudeAlphabet:
        return self.composition.alphabet

    @property
    def size(self) -> int:
        return self._size

    def unrank(self, index: int) -> np.ndarray:
        if not 0 <= index < self._size:
            raise ValueError(f"rank {index} outside 0..{self._size - 1}")
        remaining = list(self.composition.counts)
        total = self._size
        out = np.empty(self.n, dtype=np.int64)
        for i, r in enumerate(range(self.n, 0, -1)):
            for lv, c in enumerate(remaining):
                if not c:
                    continue
                block = total * c // r
                if index < block:
                    out[i] = lv
                    remaining[lv] -= 1
                    total = block
                    break
                index -= block
        return out

    def rank(self, level_indices, clip: bool = False) -> int:
        """Lexicographic rank among the permutations of the composition.

        With ``clip`` a level whose budget is exhausted is replaced by the
        nearest level still available, and the rank is capped at ``2**k - 1``.
        """
        seq = np.asarray(level_indices, dtype=np.int64)
        if seq.shape != (self.n,):
            raise ValueError(f"expected {self.n} amplitudes, got shape {seq.shape}")
        if not clip:
            got = np.bincount(seq, minlength=len(self.alphabet))
            if tuple(got) != self.composition.counts:
                raise CompositionViolationError(
                    f"composition violation: counts {tuple(int(x) for x in got)} "
                    f"!= {self.composition.counts}"
                )
        remaining = list(self.composition.counts)
        total = self._size
        rank = 0
        for i, r in enumerate(range(self.n, 0, -1)):
            lv = int(seq[i])
            if not 0 <= lv < len(remaining):
                raise ValueError(f"level index {lv} out of range")
            if not remaining[lv]:
                avail = [j for j, c in enumerate(remaining) if c]
                lv = min(avail, key=lambda j: (abs(j - lv), j))
            for j in range(lv):
                rank += total * remaining[j] // r
            total = total * remaining[lv] // r
            remaining[lv] -= 1
        if rank >= (1 << self.k):
            if not clip:
                raise UnaddressedSequenceError(
                    f"unaddressed sequence: rank {rank} >= 2**{self.k}"
                )
            rank = (1 << self.k) - 1
        return rank

    def encode_levels(self, bits) -> np.ndarray:
        return self.unrank(bits_to_int(bits, self.k))

    def decode_levels(self, level_indices, clip: bool = False) -> np.ndarray:
        return int_to_bits(self.rank(level_indices, clip=clip), self.k)

    def encode(self, bits) -> np.ndarray:
        levels = np.asarray(self.alphabet.levels, dtype=np.int64)
        return levels[self.encode_levels(bits)]

    def decode(self, amplitudes) -> np.ndarray:
        idx = [self.alphabet.index(a) for a in np.asarray(amplitudes).ravel()]
        return self.decode_levels(idx)

    def amplitude_distribution(self) -> AmplitudeDistribution:
        return self.composition.distribution()


def ccdm_encode(codec: CcdmCodec, bits) -> np.ndarray:
    return codec.encode(bits)


def ccdm_decode(codec: CcdmCodec, amplitudes) -> np.ndarray:
    return codec.decode(amplitudes)
