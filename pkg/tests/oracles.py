"""Brute-force references, deliberately independent of the package code paths."""

import itertools
from math import factorial

import numpy as np


def sphere_sequences(levels, n, e_max):
    """All length-n sequences with sum of squares <= e_max, lexicographic."""
    return [s for s in itertools.product(sorted(levels), repeat=n) if sum(a * a for a in s) <= e_max]


def multiset_permutations(levels, counts):
    items = [a for a, c in zip(levels, counts) for _ in range(c)]
    return sorted(set(itertools.permutations(items)))


def factorial_ratio(counts):
    out = factorial(sum(counts))
    for c in counts:
        out //= factorial(c)
    return out


def compositions(n, parts):
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def int_bits(value, width):
    return [int(b) for b in format(value, f"0{width}b")] if width else []


def gmi_quadrature(points, labels, snr_db, order=80):
    """GMI (bits per real dimension) of a uniform 1D constellation over AWGN.

    Gauss-Hermite quadrature over the noise for every transmitted point,
    with exact (log-sum-exp) bit metrics.
    """
    points = np.asarray(points, float)
    labels = np.asarray(labels)
    var1 = 10 ** (-snr_db / 10) / 2
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    noise = np.sqrt(2 * var1) * nodes
    weights = weights / np.sqrt(np.pi)
    m = labels.shape[1]
    gmi = 0.0
    for b in range(m):
        total = 0.0
        for x, lab in zip(points, labels):
            y = x + noise
            metric = -((y[:, None] - points[None, :]) ** 2) / (2 * var1)
            same = labels[:, b] == lab[b]
            num = np.logaddexp.reduce(metric[:, same], axis=1)
            den = np.logaddexp.reduce(metric, axis=1)
            total += np.sum(weights * (den - num)) / np.log(2)
        gmi += 1 - total / len(points)
    return gmi


HAMMING_7_4 = """\
7 3
3 4
2 2 2 3 1 1 1
4 4 4
1 2 0
1 3 0
2 3 0
1 2 3
1 0 0
2 0 0
3 0 0
1 2 4 5
1 3 4 6
2 3 4 7
"""

# rate-1/2 length-6 code, full rank, no 4-cycles
TOY_6_3 = """\
6 3
2 3
2 2 2 1 1 1
3 3 3
1 3
1 2
2 3
1 0
2 0
3 0
1 2 4
2 3 5
1 3 6
"""
