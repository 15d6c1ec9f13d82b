"""Systematic binary LDPC codes and a flooding sum-product decoder.

Two families are supported: the length-64800 DVB-S2 codes (accumulator
structure, parity bits follow the information bits) and arbitrary codes read
from alist text, encoded through Gaussian elimination over GF(2).

LLRs follow ``L = log(P(bit=0) / P(bit=1))``.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

import numba
import numpy as np
import scipy.sparse as sp

from .errors import ParityCheckParseError

__all__ = [
    "ParityCheck",
    "dvbs2_code",
    "load_parity_check",
    "read_alist",
    "to_alist",
    "decode",
    "LLR_CLIP",
]

LLR_CLIP = 50.0

_DVBS2 = {
    Fraction(3, 4): ("dvbs2_r3_4.txt", 48600, 45),
    Fraction(4, 5): ("dvbs2_r4_5.txt", 51840, 36),
}


class ParityCheck:
    """Sparse parity-check matrix plus a systematic encoder.

    ``info_positions`` lists the codeword positions carrying the information
    word (in order); the remaining positions hold parity.
    """

    def __init__(self, rows, cols, n_bits, n_checks, info_positions=None, name=None):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        if rows.size and (np.any((rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1]))):
            raise ValueError("duplicate entries in parity-check matrix")
        self.n_bits = int(n_bits)
        self.n_checks = int(n_checks)
        self.name = name
        self.edge_check = rows
        self.edge_var = cols
        self.check_ptr = np.searchsorted(rows, np.arange(self.n_checks + 1)).astype(np.int64)
        by_var = np.argsort(cols, kind="stable")
        self.var_edges = by_var.astype(np.int64)
        self.var_ptr = np.searchsorted(cols[by_var], np.arange(self.n_bits + 1)).astype(np.int64)
        self.H = sp.csr_matrix(
            (np.ones(rows.size, dtype=np.uint8), (rows, cols)), shape=(self.n_checks, self.n_bits)
        )
        if info_positions is None:
            self._build_generic_encoder()
        else:
            self.info_positions = np.asarray(info_positions, dtype=np.int64)
            self._gen = None
        mask = np.ones(self.n_bits, dtype=bool)
        mask[self.info_positions] = False
        self.parity_positions = np.flatnonzero(mask)
        for a in (self.edge_check, self.edge_var, self.check_ptr, self.var_edges, self.var_ptr,
                  self.info_positions, self.parity_positions):
            a.setflags(write=False)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<ParityCheck{label} n={self.n_bits} k={self.k} edges={self.edge_var.size}>"

    @property
    def k(self) -> int:
        return self.n_bits - self.n_checks

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n_bits)

    def _build_generic_encoder(self):
        h = self.H.toarray().astype(bool)
        m, n = h.shape
        pivots = []
        r = 0
        for c in range(n):
            if r == m:
                break
            hits = np.flatnonzero(h[r:, c])
            if hits.size == 0:
                continue
            p = r + hits[0]
            if p != r:
                h[[r, p]] = h[[p, r]]
            others = np.flatnonzero(h[:, c])
            others = others[others != r]
            h[others] ^= h[r]
            pivots.append(c)
            r += 1
        if r < m:
            raise ValueError(f"rank-deficient parity-check matrix: rank {r} < {m} checks")
        pivots = np.array(pivots, dtype=np.int64)
        info = np.setdiff1d(np.arange(n), pivots)
        self.info_positions = info
        # x[pivots[r]] = sum_c h[r, info[c]] * u[c]
        self._gen = (pivots, h[:, info].astype(np.uint8))

    def encode(self, info_bits) -> np.ndarray:
        u = np.asarray(info_bits, dtype=np.uint8).ravel()
        if u.size != self.k:
            raise ValueError(f"expected {self.k} information bits, got {u.size}")
        cw = np.zeros(self.n_bits, dtype=np.uint8)
        cw[self.info_positions] = u
        if self._gen is None:
            # DVB-S2: accumulate the information contributions along the parity chain
            acc = (self.H[:, : self.k] @ u.astype(np.int64)) & 1
            cw[self.k:] = np.bitwise_xor.accumulate(acc.astype(np.uint8))
        else:
            pivots, g = self._gen
            cw[pivots] = (g.astype(np.int64) @ u) & 1
        return cw

    def syndrome(self, codeword) -> np.ndarray:
        c = np.asarray(codeword, dtype=np.int64).ravel()
        return ((self.H @ c) & 1).astype(np.uint8)

    def is_codeword(self, codeword) -> bool:
        return not self.syndrome(codeword).any()

    def extract_info(self, codeword) -> np.ndarray:
        return np.asarray(codeword)[self.info_positions]

    def decode(self, llrs, max_iter: int = 50):
        return decode(self, llrs, max_iter)


def dvbs2_code(rate) -> ParityCheck:
    """Normal-frame (64800 bit) DVB-S2 LDPC code of rate 3/4 or 4/5."""
    key = Fraction(rate).limit_denominator(100)
    if key not in _DVBS2:
        raise ValueError(f"unsupported DVB-S2 rate {rate}; available: 3/4, 4/5")
    fname, k, q = _DVBS2[key]
    n = 64800
    m = n - k
    text = resources.files("pasim").joinpath("data", fname).read_text()
    table = [
        [int(x) for x in line.split()]
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if len(table) * 360 != k:
        raise ValueError(f"{fname}: {len(table)} rows do not cover {k} information bits")
    rows, cols = [], []
    w = np.arange(360)
    for t, addrs in enumerate(table):
        bits = t * 360 + w
        for x in addrs:
            rows.append((x + w * q) % m)
            cols.append(bits)
    rows.append(np.arange(m))
    cols.append(k + np.arange(m))
    rows.append(np.arange(1, m))
    cols.append(k + np.arange(m - 1))
    return ParityCheck(
        np.concatenate(rows), np.concatenate(cols), n, m,
        info_positions=np.arange(k), name=f"DVB-S2 {key}",
    )


def read_alist(text: str):
    """Parse alist text into ``(n_bits, n_checks, rows, cols)`` (0-based)."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    pos = 0

    def take(expected=None, what="line"):
        nonlocal pos
        if pos >= len(lines):
            raise ParityCheckParseError(f"unexpected end of input while reading {what}",
                                        lines[-1][0] + 1 if lines else 1)
        no, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise ParityCheckParseError(f"non-integer token in {what}", no) from None
        if expected is not None and len(vals) != expected:
            raise ParityCheckParseError(f"expected {expected} values in {what}, got {len(vals)}", no)
        return no, vals

    no, (n, m) = take(2, "dimensions")
    if n <= 0 or m <= 0:
        raise ParityCheckParseError("dimensions must be positive", no)
    take(2, "maximum degrees")
    no_cw, col_w = take(n, "column degrees")
    no_rw, row_w = take(m, "row degrees")
    entries = set()
    for j in range(n):
        no, vals = take(None, f"column {j + 1}")
        idx = [v for v in vals if v != 0]
        if len(idx) != col_w[j]:
            raise ParityCheckParseError(f"column {j + 1} lists {len(idx)} rows, degree says {col_w[j]}", no)
        for v in idx:
            if not 1 <= v <= m:
                raise ParityCheckParseError(f"row index {v} out of range 1..{m}", no)
            entries.add((v - 1, j))
    from_rows = set()
    for i in range(m):
        no, vals = take(None, f"row {i + 1}")
        idx = [v for v in vals if v != 0]
        if len(idx) != row_w[i]:
            raise ParityCheckParseError(f"row {i + 1} lists {len(idx)} columns, degree says {row_w[i]}", no)
        for v in idx:
            if not 1 <= v <= n:
                raise ParityCheckParseError(f"column index {v} out of range 1..{n}", no)
            from_rows.add((i, v - 1))
    if entries != from_rows:
        raise ParityCheckParseError("column lists and row lists describe different matrices", no)
    if pos != len(lines):
        raise ParityCheckParseError("trailing data after row lists", lines[pos][0])
    rc = np.array(sorted(entries), dtype=np.int64).reshape(-1, 2)
    return n, m, rc[:, 0], rc[:, 1]


def load_parity_check(text: str, name=None) -> ParityCheck:
    n, m, rows, cols = read_alist(text)
    return ParityCheck(rows, cols, n, m, name=name)


def to_alist(code: ParityCheck) -> str:
    col_lists = [[] for _ in range(code.n_bits)]
    row_lists = [[] for _ in range(code.n_checks)]
    for r, c in zip(code.edge_check, code.edge_var):
        col_lists[c].append(r + 1)
        row_lists[r].append(c + 1)
    cw = [len(x) for x in col_lists]
    rw = [len(x) for x in row_lists]
    out = [f"{code.n_bits} {code.n_checks}", f"{max(cw)} {max(rw)}",
           " ".join(map(str, cw)), " ".join(map(str, rw))]
    out += [" ".join(map(str, sorted(x) + [0] * (max(cw) - len(x)))) for x in col_lists]
    out += [" ".join(map(str, sorted(x) + [0] * (max(rw) - len(x)))) for x in row_lists]
    return "\n".join(out) + "\n"


@numba.njit(cache=True)
def _syndrome_ok(hard, edge_var, check_ptr):
    for c in range(check_ptr.size - 1):
        s = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            s ^= hard[edge_var[e]]
        if s:
            return False
    return True


@numba.njit(cache=True)
def _spa(llr, edge_var, check_ptr, var_edges, var_ptr, max_iter):
    n = llr.size
    n_edges = edge_var.size
    hard = np.empty(n, np.uint8)
    for v in range(n):
        hard[v] = 1 if llr[v] < 0 else 0
    if _syndrome_ok(hard, edge_var, check_ptr):
        return hard, True, 0
    th = np.empty(n_edges)
    r = np.empty(n_edges)
    pre = np.empty(n_edges)
    for e in range(n_edges):
        th[e] = np.tanh(0.5 * llr[edge_var[e]])
    lim = 1.0 - 1e-15
    for it in range(1, max_iter + 1):
        for c in range(check_ptr.size - 1):
            lo = check_ptr[c]
            hi = check_ptr[c + 1]
            # product of tanh over the other edges via prefix/suffix passes
            acc = 1.0
            for e in range(lo, hi):
                pre[e] = acc
                acc *= th[e]
            acc = 1.0
            for e in range(hi - 1, lo - 1, -1):
                p = pre[e] * acc
                if p > lim:
                    p = lim
                elif p < -lim:
                    p = -lim
                r[e] = 2.0 * np.arctanh(p)
                acc *= th[e]
        for v in range(n):
            total = llr[v]
            for i in range(var_ptr[v], var_ptr[v + 1]):
                total += r[var_edges[i]]
            hard[v] = 1 if total < 0 else 0
            for i in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edges[i]
                m = total - r[e]
                if m > 50.0:
                    m = 50.0
                elif m < -50.0:
                    m = -50.0
                th[e] = np.tanh(0.5 * m)
        if _syndrome_ok(hard, edge_var, check_ptr):
            return hard, True, it
    return hard, False, max_iter


def decode(code: ParityCheck, llrs, max_iter: int = 50, return_iterations: bool = False):
    """Sum-product decoding; returns ``(hard_bits, converged)``.

    Stops as soon as the hard decisions satisfy every check.  All-zero input
    is treated as an erasure and reported as not converged.
    """
    llr = np.asarray(llrs, dtype=np.float64).ravel()
    if llr.size != code.n_bits:
        raise ValueError(f"expected {code.n_bits} LLRs, got {llr.size}")
    llr = np.clip(llr, -LLR_CLIP, LLR_CLIP)
    if not np.any(llr):
        out = (np.zeros(code.n_bits, np.uint8), False)
        return out + (0,) if return_iterations else out
    bits, ok, its = _spa(llr, code.edge_var, code.check_ptr, code.var_edges, code.var_ptr, int(max_iter))
    if return_iterations:
        return bits, bool(ok), int(its)
    return bits, bool(ok)
