"""Amplitude alphabets, bit labels and Maxwell-Boltzmann amplitude priors.

A 2^m-ASK dimension is split into a sign and an amplitude from
``{1, 3, ..., 2^m - 1}``.  The 1D label is ``(sign, amp_bit_1, ..., amp_bit_{m-1})``
with the sign as MSB (0 -> +, 1 -> -) and the amplitude bits a binary
reflected Gray code over the amplitude index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AmplitudeAlphabet",
    "AmplitudeDistribution",
    "SymbolMap",
    "mb_distribution",
    "mb_for_entropy",
    "entropy",
    "amplitude_bits",
    "bits_to_amplitude",
]


def _brgc(index: int, width: int) -> tuple[int, ...]:
    g = index ^ (index >> 1)
    return tuple((g >> (width - 1 - b)) & 1 for b in range(width))


@dataclass(frozen=True)
class AmplitudeAlphabet:
    """Positive odd amplitude levels ``1, 3, ..., 2M-1`` with Gray labels."""

    levels: tuple[int, ...]
    bits_per_amplitude: int = field(init=False)
    amp_labels: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        levels = tuple(int(a) for a in self.levels)
        size = len(levels)
        if size == 0 or size & (size - 1):
            raise ValueError(f"number of levels must be a power of two, got {size}")
        if levels != tuple(range(1, 2 * size, 2)):
            raise ValueError(f"levels must be 1, 3, ..., {2 * size - 1}; got {levels}")
        width = size.bit_length() - 1
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "bits_per_amplitude", width)
        object.__setattr__(self, "amp_labels", tuple(_brgc(j, width) for j in range(size)))

    @classmethod
    def pam(cls, num_levels: int) -> "AmplitudeAlphabet":
        """Amplitude alphabet of a ``2*num_levels``-ASK dimension."""
        return cls(tuple(range(1, 2 * num_levels, 2)))

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def bits_per_dimension(self) -> int:
        """Label width of one real dimension, sign included."""
        return self.bits_per_amplitude + 1

    @property
    def energies(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.int64) ** 2

    def index(self, amplitude: int) -> int:
        a = int(amplitude)
        if a < 1 or a % 2 == 0 or a > self.levels[-1]:
            raise ValueError(f"amplitude {amplitude} not in alphabet {self.levels}")
        return (a - 1) // 2

    def label_matrix(self) -> np.ndarray:
        """``(len, bits_per_amplitude)`` array of amplitude labels."""
        return np.array(self.amp_labels, dtype=np.uint8).reshape(len(self), self.bits_per_amplitude)

    def label_to_index_table(self) -> np.ndarray:
        """Lookup from the integer value of an amplitude label to the level index."""
        table = np.empty(len(self), dtype=np.int64)
        weights = 1 << np.arange(self.bits_per_amplitude - 1, -1, -1)
        for j, lab in enumerate(self.amp_labels):
            table[int(np.dot(lab, weights))] = j
        return table


@dataclass(frozen=True)
class AmplitudeDistribution:
    alphabet: AmplitudeAlphabet
    probs: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.probs)
        if len(p) != len(self.alphabet):
            raise ValueError(f"expected {len(self.alphabet)} probabilities, got {len(p)}")
        if min(p) < 0.0:
            raise ValueError("probabilities must be non-negative")
        if abs(sum(p) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(p)!r}, not 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, alphabet: AmplitudeAlphabet) -> "AmplitudeDistribution":
        return cls(alphabet, (1.0 / len(alphabet),) * len(alphabet))

    @classmethod
    def from_counts(cls, alphabet: AmplitudeAlphabet, counts) -> "AmplitudeDistribution":
        counts = [int(c) for c in counts]
        total = sum(counts)
        return cls(alphabet, tuple(c / total for c in counts))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def mean_energy(self) -> float:
        """Average of ``a**2`` per real dimension."""
        return float(np.dot(self.as_array(), self.alphabet.energies))


def entropy(dist: AmplitudeDistribution) -> float:
    """Entropy in bits of the amplitude distribution."""
    p = dist.as_array()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def mb_distribution(alphabet: AmplitudeAlphabet, lam: float) -> AmplitudeDistribution:
    """Maxwell-Boltzmann weights ``exp(-lam * a**2)`` over the amplitude levels."""
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    e = alphabet.energies.astype(float)
    logw = -lam * (e - e[0])
    w = np.exp(logw)
    p = w / w.sum()
    p = p / p.sum()
    return AmplitudeDistribution(alphabet, tuple(p))


def mb_for_entropy(alphabet: AmplitudeAlphabet, target_bits: float, tol: float = 1e-9):
    """Find ``lam`` with ``entropy(mb_distribution(lam)) == target_bits`` by bisection.

    Returns ``(lam, distribution)``.
    """
    hmax = np.log2(len(alphabet))
    if not 0.0 < target_bits <= hmax:
        raise ValueError(f"target entropy must lie in (0, {hmax}], got {target_bits}")
    if target_bits >= hmax - tol:
        return 0.0, mb_distribution(alphabet, 0.0)
    lo, hi = 0.0, 1.0
    while entropy(mb_distribution(alphabet, hi)) > target_bits:
        hi *= 2.0
    while True:
        mid = 0.5 * (lo + hi)
        h = entropy(mb_distribution(alphabet, mid))
        if abs(h - target_bits) <= tol or hi - lo < 1e-15:
            return mid, mb_distribution(alphabet, mid)
        if h > target_bits:
            lo = mid
        else:
            hi = mid


def amplitude_bits(alphabet: AmplitudeAlphabet, level_index: int) -> tuple[int, ...]:
    if not 0 <= level_index < len(alphabet):
        raise IndexError(f"level index {level_index} out of range 0..{len(alphabet) - 1}")
    return alphabet.amp_labels[level_index]


def bits_to_amplitude(alphabet: AmplitudeAlphabet, bits) -> int:
    """Inverse of :func:`amplitude_bits`; returns the level index."""
    bits = tuple(int(b) for b in bits)
    try:
        return alphabet.amp_labels.index(bits)
    except ValueError:
        raise ValueError(f"{bits} is not an amplitude label of {alphabet.levels}") from None


@dataclass(frozen=True)
class SymbolMap:
    """Scaled product QAM: I and Q are independent signed amplitudes.

    ``scale`` makes the average 2D energy one when amplitudes follow
    ``dist`` and signs are uniform.
    """

    dist: AmplitudeDistribution
    scale: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "scale", float(1.0 / np.sqrt(2.0 * self.dist.mean_energy())))

    @property
    def alphabet(self) -> AmplitudeAlphabet:
        return self.dist.alphabet

    def points_1d(self) -> np.ndarray:
        """Scaled 1D points and their labels, ordered by label value.

        Returns ``(points, labels, log_priors)`` where ``labels`` has shape
        ``(2M, m)`` with the sign bit first.
        """
        alph = self.alphabet
        pts, labels, logp = [], [], []
        p = self.dist.as_array()
        with np.errstate(divide="ignore"):
            for sign in (0, 1):
                for j, a in enumerate(alph.levels):
                    pts.append((1 - 2 * sign) * a * self.scale)
                    labels.append((sign,) + alph.amp_labels[j])
                    logp.append(np.log(p[j] / 2.0))
        return np.array(pts), np.array(labels, dtype=np.uint8), np.array(logp)

    def modulate_1d(self, signs, level_indices) -> np.ndarray:
        signs = np.asarray(signs, dtype=np.int64)
        levels = np.asarray(self.alphabet.levels, dtype=float)[np.asarray(level_indices)]
        return (1 - 2 * signs) * levels * self.scale

    def modulate(self, signs, level_indices) -> np.ndarray:
        """Pair consecutive 1D values into complex symbols (even -> I, odd -> Q)."""
        x = self.modulate_1d(signs, level_indices)
        if x.size % 2:
            raise ValueError("need an even number of 1D symbols to form 2D symbols")
        return x[0::2] + 1j * x[1::2]

    def sample(self, num_symbols: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Draw i.i.d. 2D symbols; returns ``(symbols, signs, level_indices)``."""
        idx = rng.choice(len(self.alphabet), size=2 * num_symbols, p=self.dist.as_array())
        signs = rng.integers(0, 2, size=2 * num_symbols)
        return self.modulate(signs, idx), signs, idx
