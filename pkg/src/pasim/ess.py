"""Enumerative sphere shaping with exact (big integer) trellis counts.

All odd amplitudes satisfy ``a**2 = 1 (mod 8)``, so after ``i`` amplitudes the
accumulated energy is ``i + 8*j`` for an integer ``j``.  The trellis stores
counts indexed by ``(i, j)``; a node is kept when its remaining ``n - i``
amplitudes can still fit under the bound, which gives every stage the same
width ``J + 1`` with ``J = (e_max - n) // 8``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .constellation import AmplitudeAlphabet, AmplitudeDistribution
from .errors import OutsideSphereError, UnaddressedSequenceError
from .util import bits_to_int, int_to_bits

__all__ = [
    "EssTrellis",
    "EssCodec",
    "build_trellis",
    "sphere_sizes",
    "select_emax",
    "ess_encode",
    "ess_decode",
    "induced_distribution",
]


def _steps(alphabet: AmplitudeAlphabet) -> list[int]:
    return [(a * a - 1) // 8 for a in alphabet.levels]


@dataclass(frozen=True, eq=False)
class EssTrellis:
    """Bounded-energy counting trellis.

    ``counts[i][j]`` is the number of ways to complete a prefix of length ``i``
    and energy ``i + 8*j`` to a full sequence with energy at most ``e_max``.
    """

    n: int
    alphabet: AmplitudeAlphabet
    e_max: int
    counts: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def size(self) -> int:
        """Number of sequences in the sphere."""
        return self.counts[0][0]

    @property
    def k(self) -> int:
        return self.size.bit_length() - 1

    @property
    def width(self) -> int:
        return len(self.counts[0])

    def count(self, i: int, energy: int) -> int:
        """``T(i, e)``; zero for unreachable or over-budget nodes."""
        off = energy - i
        if off < 0 or off % 8:
            return 0
        j = off // 8
        return self.counts[i][j] if j < self.width else 0

    @cached_property
    def prefix_counts(self) -> tuple[tuple[int, ...], ...]:
        """Forward pass: number of prefixes of length ``i`` reaching each node."""
        steps = _steps(self.alphabet)
        width = self.width
        fwd = [[0] * width for _ in range(self.n + 1)]
        fwd[0][0] = 1
        for i in range(self.n):
            cur, nxt = fwd[i], fwd[i + 1]
            for j, c in enumerate(cur):
                if c:
                    for s in steps:
                        if j + s < width:
                            nxt[j + s] += c
        return tuple(tuple(row) for row in fwd)


def build_trellis(n: int, alphabet: AmplitudeAlphabet, e_max: int) -> EssTrellis:
    if n < 1:
        raise ValueError(f"blocklength must be positive, got {n}")
    if e_max < n:
        raise ValueError(f"empty sphere: e_max={e_max} is below the minimum energy {n}")
    width = (e_max - n) // 8 + 1
    steps = _steps(alphabet)
    rows = [None] * (n + 1)
    nxt = [1] * width
    rows[n] = tuple(nxt)
    for i in range(n - 1, -1, -1):
        cur = [0] * width
        for s in steps:
            if s >= width:
                break
            for j in range(width - s):
                cur[j] += nxt[j + s]
        rows[i] = tuple(cur)
        nxt = cur
    return EssTrellis(n, alphabet, e_max, tuple(rows))


def sphere_sizes(n: int, alphabet: AmplitudeAlphabet) -> tuple[list[int], list[int]]:
    """Energies ``e = n + 8*j`` and the number of sequences with energy ``<= e``.

    Computed from the exact energy spectrum (repeated convolution), which is
    independent of the trellis recursion.
    """
    steps = _steps(alphabet)
    top = n * steps[-1]
    spectrum = [0] * (top + 1)
    spectrum[0] = 1
    reach = 0
    for _ in range(n):
        new = [0] * (top + 1)
        for j in range(reach + 1):
            c = spectrum[j]
            if c:
                for s in steps:
                    new[j + s] += c
        spectrum = new
        reach += steps[-1]
    energies, cumulative, acc = [], [], 0
    for j, c in enumerate(spectrum):
        acc += c
        energies.append(n + 8 * j)
        cumulative.append(acc)
    return energies, cumulative


def select_emax(n: int, alphabet: AmplitudeAlphabet, k_target: int) -> int:
    """Smallest energy bound whose sphere holds at least ``2**k_target`` sequences."""
    if k_target < 0 or k_target > n * alphabet.bits_per_amplitude:
        raise ValueError(
            f"infeasible k_target={k_target} for n={n} and {len(alphabet)} levels"
        )
    need = 1 << k_target
    energies, cumulative = sphere_sizes(n, alphabet)
    for e, c in zip(energies, cumulative):
        if c >= need:
            return e
    raise AssertionError("unreachable: the full hypercube always suffices")


@dataclass(frozen=True)
class EssCodec:
    """Fixed-length map between ``k`` bits and the first ``2**k`` sphere points."""

    trellis: EssTrellis
    k: int = None

    def __post_init__(self):
        k = self.trellis.k if self.k is None else int(self.k)
        if k < 0 or (1 << k) > self.trellis.size:
            raise ValueError(f"k={k} exceeds the sphere size {self.trellis.size}")
        object.__setattr__(self, "k", k)

    @classmethod
    def for_rate(cls, n: int, alphabet: AmplitudeAlphabet, k: int) -> "EssCodec":
        return cls(build_trellis(n, alphabet, select_emax(n, alphabet, k)), k)

    @property
    def n(self) -> int:
        return self.trellis.n

    @property
    def alphabet(self) -> AmplitudeAlphabet:
        return self.trellis.alphabet

    @property
    def e_max(self) -> int:
        return self.trellis.e_max

    def unrank(self, index: int) -> np.ndarray:
        """Level indices of the sphere sequence with lexicographic rank ``index``."""
        t = self.trellis
        if not 0 <= index < t.size:
            raise ValueError(f"rank {index} outside 0..{t.size - 1}")
        steps = _steps(t.alphabet)
        width = t.width
        out = np.empty(t.n, dtype=np.int64)
        j = 0
        for i in range(t.n):
            row = t.counts[i + 1]
            for lv, s in enumerate(steps):
                c = row[j + s] if j + s < width else 0
                if index < c:
                    out[i] = lv
                    j += s
                    break
                index -= c
            else:
                raise AssertionError("trellis inconsistent with rank")
        return out

    def rank(self, level_indices, clip: bool = False) -> int:
        """Lexicographic rank of a sequence of level indices.

        With ``clip`` the rank is always produced: an over-budget amplitude is
        replaced by the largest one still fitting and the result is capped at
        ``2**k - 1``.
        """
        t = self.trellis
        seq = np.asarray(level_indices, dtype=np.int64)
        if seq.shape != (t.n,):
            raise ValueError(f"expected {t.n} amplitudes, got shape {seq.shape}")
        steps = _steps(t.alphabet)
        width = t.width
        rank = 0
        j = 0
        for i in range(t.n):
            lv = int(seq[i])
            if not 0 <= lv < len(steps):
                raise ValueError(f"level index {lv} out of range")
            row = t.counts[i + 1]
            if j + steps[lv] >= width:
                if not clip:
                    energy = sum(t.alphabet.levels[x] ** 2 for x in seq)
                    raise OutsideSphereError(
                        f"outside sphere: energy {energy} exceeds e_max={t.e_max}"
                    )
                while j + steps[lv] >= width:
                    lv -= 1
            for s in steps[:lv]:
                rank += row[j + s]
            j += steps[lv]
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
        """Map ``k`` bits to ``n`` amplitudes."""
        levels = np.asarray(self.alphabet.levels, dtype=np.int64)
        return levels[self.encode_levels(bits)]

    def decode(self, amplitudes) -> np.ndarray:
        idx = [self.alphabet.index(a) for a in np.asarray(amplitudes).ravel()]
        return self.decode_levels(idx)

    def amplitude_distribution(self) -> AmplitudeDistribution:
        return induced_distribution(self.trellis)


def ess_encode(codec: EssCodec, bits) -> np.ndarray:
    return codec.encode(bits)


def ess_decode(codec: EssCodec, amplitudes) -> np.ndarray:
    return codec.decode(amplitudes)


def induced_distribution(trellis: EssTrellis) -> AmplitudeDistribution:
    """Average amplitude distribution over all sequences of the sphere."""
    steps = _steps(trellis.alphabet)
    width = trellis.width
    fwd = trellis.prefix_counts
    totals = [0] * len(steps)
    for i in range(trellis.n):
        row_f, row_b = fwd[i], trellis.counts[i + 1]
        for lv, s in enumerate(steps):
            acc = 0
            for j in range(width - s):
                f = row_f[j]
                if f:
                    acc += f * row_b[j + s]
            totals[lv] += acc
    denom = trellis.n * trellis.size
    probs = [t / denom for t in totals]
    s = sum(probs)
    return AmplitudeDistribution(trellis.alphabet, tuple(p / s for p in probs))
