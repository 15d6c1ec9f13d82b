"""Bit vector helpers shared by the codecs."""

import numpy as np


def as_bits(bits, length=None) -> np.ndarray:
    """Coerce a ``'0101'`` string or 0/1 sequence to a ``uint8`` array."""
    if isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits).astype(np.uint8, copy=False).ravel()
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    if length is not None and arr.size != length:
        raise ValueError(f"expected {length} bits, got {arr.size}")
    return arr


def bits_to_int(bits, length=None) -> int:
    """MSB-first integer value of a bit vector."""
    arr = as_bits(bits, length)
    if arr.size == 0:
        return 0
    pad = (-arr.size) % 8
    packed = np.packbits(np.concatenate([np.zeros(pad, np.uint8), arr]))
    return int.from_bytes(packed.tobytes(), "big")


def int_to_bits(value: int, length: int) -> np.ndarray:
    if value < 0 or value >> length:
        raise ValueError(f"{value} does not fit in {length} bits")
    if length == 0:
        return np.zeros(0, np.uint8)
    nbytes = (length + 7) // 8
    raw = np.frombuffer(value.to_bytes(nbytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[8 * nbytes - length:].copy()
