"""Arithmetic in the finite field of order 256.

Polynomial basis with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B),
log/antilog tables built from generator 0x03. Addition is XOR. Table-driven
multiplication keeps results bit-exact across implementations.
"""

from __future__ import annotations

REDUCTION_POLY = 0x11B
GENERATOR = 0x03

EXP = [0] * 512
LOG = [0] * 256


def _build_tables():
    x = 1
    for i in range(255):
        EXP[i] = x
        LOG[x] = i
        # Multiply by the generator 0x03 = x + 1: shift plus XOR, then reduce.
        x ^= (x << 1)
        if x & 0x100:
            x ^= REDUCTION_POLY
    for i in range(255, 512):
        EXP[i] = EXP[i - 255]


_build_tables()


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse")
    return EXP[255 - LOG[a]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError
    if a == 0:
        return 0
    return EXP[(LOG[a] - LOG[b]) % 255]


class GF256:
    """Field interface used by the coding routines."""

    order = 256
    poly = "0x11B"

    add = staticmethod(gf_add)
    mul = staticmethod(gf_mul)
    inv = staticmethod(gf_inv)


class GF2:
    """Binary field, for sanity comparisons against the 256-element field."""

    order = 2
    poly = "0x3"

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    @staticmethod
    def mul(a: int, b: int) -> int:
        return a & b

    @staticmethod
    def inv(a: int) -> int:
        if a == 0:
            raise ZeroDivisionError
        return 1


def matrix_rank(rows: list[list[int]], field=GF256) -> int:
    """Rank via exact Gaussian elimination over the field."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = field.inv(m[rank][col])
        m[rank] = [field.mul(inv, x) for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [field.add(x, field.mul(factor, y)) for x, y in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def solve_linear_system(matrix: list[list[int]], rhs: list[int], field=GF256):
    """Solve a square full-rank system M x = y; returns None if singular."""
    n = len(matrix)
    aug = [list(row) + [y] for row, y in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = field.inv(aug[col][col])
        aug[col] = [field.mul(inv, x) for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [field.add(x, field.mul(factor, y)) for x, y in zip(aug[i], aug[col])]
    return [row[n] for row in aug]
