"""Systematic (k+r, k) Cauchy MDS base code, one instance (column) at a time.

Positions are 1-based: 1..k are systematic, k+1..k+r carry parities f_1..f_r.
Symbols are either ints in [0, 255] or uint8 blocks coded lane by lane.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf import dot, gf_inv, mat_inv

FIELD_SIZE = 256


class ErasureError(ValueError):
    """Not enough symbols to decode."""


@dataclass(frozen=True)
class CodeParams:
    k: int
    r: int

    def __post_init__(self):
        if self.k < 1 or self.r < 1:
            raise ValueError(f"need k >= 1 and r >= 1, got k={self.k} r={self.r}")
        if self.k + self.r > FIELD_SIZE:
            raise ValueError(f"field too small for k + r = {self.k + self.r}")

    @property
    def m(self) -> int:
        # instances per stripe
        return self.r

    @property
    def n(self) -> int:
        return self.k + self.r


@dataclass(frozen=True)
class ParityMatrix:
    k: int
    rows: tuple  # r tuples of length k

    @property
    def r(self) -> int:
        return len(self.rows)

    def generator_row(self, pos: int) -> tuple:
        """Row of the (k+r) x k generator [I_k; P] for 1-based ``pos``."""
        if pos <= self.k:
            return tuple(int(j == pos - 1) for j in range(self.k))
        return self.rows[pos - self.k - 1]


def build_parity_matrix(params: CodeParams) -> ParityMatrix:
    k, r = params.k, params.r
    if k + r > FIELD_SIZE:
        raise ValueError("field too small")
    xs = range(r)           # x_i = i - 1
    ys = range(r, r + k)    # y_j = r + j - 1
    rows = tuple(tuple(gf_inv(x ^ y) for y in ys) for x in xs)
    return ParityMatrix(k, rows)


def _as_blocks(values):
    if all(isinstance(v, np.ndarray) for v in values):
        return list(values), False
    return [np.array([v], dtype=np.uint8) for v in values], True


def mds_encode(pm: ParityMatrix, a):
    """Parity column (f_1(a), ..., f_r(a)) for a message column of k symbols."""
    if len(a) != pm.k:
        raise ValueError(f"expected {pm.k} message symbols, got {len(a)}")
    blocks, scalar = _as_blocks(a)
    out = [dot(p, blocks) for p in pm.rows]
    return [int(b[0]) for b in out] if scalar else out


@lru_cache(maxsize=4096)
def _decoder_matrix(pm: ParityMatrix, positions: tuple):
    return mat_inv([pm.generator_row(p) for p in positions])


def mds_decode(pm: ParityMatrix, symbols):
    """Recover the k message symbols from ``(position, value)`` pairs.

    The k lowest positions supplied are used; the rest are ignored.
    """
    k = pm.k
    positions = [p for p, _ in symbols]
    if len(set(positions)) != len(positions):
        raise ValueError("invalid input: duplicate positions")
    if any(not 1 <= p <= k + pm.r for p in positions):
        raise ValueError("invalid input: position out of range")
    if len(symbols) < k:
        raise ErasureError(f"too many erasures: {len(symbols)} symbols for k={k}")
    chosen = sorted(symbols, key=lambda s: s[0])[:k]
    pos = tuple(p for p, _ in chosen)
    vals = [v for _, v in chosen]
    if pos == tuple(range(1, k + 1)):
        return [v.copy() if isinstance(v, np.ndarray) else v for v in vals]
    blocks, scalar = _as_blocks(vals)
    inv = _decoder_matrix(pm, pos)
    out = [dot(row, blocks) for row in inv]
    return [int(b[0]) for b in out] if scalar else out
