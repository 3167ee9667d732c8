"""Arithmetic in GF(2^8) with the polynomial x^8 + x^4 + x^3 + x^2 + 1."""

import numpy as np

POLY = 0x11D
GENERATOR = 0x02


class FieldError(ArithmeticError):
    pass


def clmul(a: int, b: int) -> int:
    """Carry-less multiply followed by reduction modulo POLY (bitwise reference)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= POLY
    return r


def _build_tables():
    exp = np.zeros(512, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int32)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x = clmul(x, GENERATOR)
    if x != 1:
        raise FieldError("generator does not have order 255")
    exp[255:510] = exp[:255]
    return exp, log


EXP, LOG = _build_tables()

# full product table; row a is the map b -> a*b, used for byte-lane kernels
MUL = np.zeros((256, 256), dtype=np.uint8)
MUL[1:, 1:] = EXP[(LOG[1:, None] + LOG[None, 1:]) % 255]
MUL.setflags(write=False)
EXP.setflags(write=False)
LOG.setflags(write=False)


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(EXP[LOG[a] + LOG[b]])


def gf_inv(a: int) -> int:
    if a == 0:
        raise FieldError("no inverse for 0")
    return int(EXP[255 - LOG[a]])


def gf_div(a: int, b: int) -> int:
    return gf_mul(a, gf_inv(b))


def scale(c: int, block: np.ndarray) -> np.ndarray:
    """Multiply every byte of ``block`` by the scalar ``c``."""
    return MUL[c][block]


def dot(coeffs, blocks) -> np.ndarray:
    """Lane-wise inner product sum_j coeffs[j] * blocks[j]."""
    out = np.zeros_like(blocks[0])
    for c, blk in zip(coeffs, blocks):
        if c == 1:
            out ^= blk
        elif c:
            out ^= MUL[c][blk]
    return out


def mat_inv(rows):
    """Invert a square matrix over GF(2^8) by Gauss-Jordan elimination.

    Pivots are taken from the lowest row index with a nonzero entry.
    """
    n = len(rows)
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise FieldError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = gf_inv(a[col][col])
        a[col] = [gf_mul(inv, v) for v in a[col]]
        for i in range(n):
            f = a[i][col]
            if i != col and f:
                a[i] = [v ^ gf_mul(f, w) for v, w in zip(a[i], a[col])]
    return [tuple(r[n:]) for r in a]
