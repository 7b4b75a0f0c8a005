"""Exact integer and rational matrix helpers on nested Python lists."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[int]]


def to_lists(M) -> Matrix:
    return [[int(x) for x in row] for row in M]


def identity(n: int, scale=1):
    return [[scale if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matsub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def transpose(A):
    return [list(r) for r in zip(*A)]


def bareiss_det(M) -> int:
    """Fraction-free Gaussian elimination determinant."""
    A = to_lists(M)
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k]:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse_fraction(M) -> Optional[list[list[Fraction]]]:
    """Gauss-Jordan inverse over the rationals, ``None`` if singular."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return None
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def det_fraction(M) -> Fraction:
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


# -- rank-t update identities over the rationals ---------------------------------

def woodbury_inverse(M, U, C, V) -> Optional[list[list[Fraction]]]:
    """``(M + UCV)^{-1}`` from ``M^{-1}`` and a ``t x t`` middle inverse.

    Uses the form ``M^{-1} - M^{-1} U (C^{-1} + V M^{-1} U)^{-1} V M^{-1}``;
    returns ``None`` when ``M``, ``C`` or the middle matrix is singular.
    """
    Mi = inverse_fraction(M)
    Ci = inverse_fraction(C)
    if Mi is None or Ci is None:
        return None
    MiU = matmul(Mi, U)
    VMi = matmul(V, Mi)
    mid = inverse_fraction(matadd(Ci, matmul(V, MiU)))
    if mid is None:
        return None
    return matsub(Mi, matmul(matmul(MiU, mid), VMi))


def det_lemma(M, U, V) -> Optional[Fraction]:
    """``det(M + U V^T)`` as ``det(I + V^T M^{-1} U) det(M)``."""
    Mi = inverse_fraction(M)
    if Mi is None:
        return None
    t = len(U[0]) if U else 0
    inner = matadd(identity(t), matmul(matmul(transpose(V), Mi), U))
    return det_fraction(inner) * det_fraction(M)


# -- determinants by Chinese remaindering -----------------------------------------

def det_mod(M, q: int) -> int:
    A = [[int(x) % q for x in row] for row in M]
    n = len(A)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c] % q
        inv = pow(A[c][c], -1, q)
        for r in range(c + 1, n):
            f = A[r][c] * inv % q
            if f:
                A[r] = [(x - f * y) % q for x, y in zip(A[r], A[c])]
    return det % q


def hadamard_sq(M) -> int:
    """Square of the Hadamard bound: product of squared column norms."""
    out = 1
    for col in zip(*M):
        out *= sum(int(x) * int(x) for x in col)
    return out


def small_primes(count_bits: int, start: int = 3) -> list[int]:
    """Consecutive primes from ``start`` whose product exceeds ``2**count_bits``."""
    out, prod, q = [], 1, start
    while prod.bit_length() <= count_bits:
        if all(q % d for d in range(2, math.isqrt(q) + 1)):
            out.append(q)
            prod *= q
        q += 1
    return out


def primes_for(M) -> list[int]:
    # need prod > 2H, i.e. prod^2 > 4 H^2
    return small_primes((4 * hadamard_sq(M)).bit_length() // 2 + 2)


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    x, N = 0, 1
    for r, q in zip(residues, moduli):
        # x' = x (mod N), x' = r (mod q)
        k = ((r - x) * pow(N, -1, q)) % q
        x += N * k
        N *= q
    return x, N


class ModulusTooSmall(ValueError):
    pass


def det_crt(B, primes: Sequence[int]) -> int:
    """Exact determinant from residues modulo distinct primes."""
    B = to_lists(B)
    if not B:
        return 1
    P = math.prod(primes)
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    if P * P <= 4 * hadamard_sq(B):
        raise ModulusTooSmall("product of primes does not exceed twice the Hadamard bound")
    x, N = crt([det_mod(B, q) for q in primes], primes)
    return x - N if x > N // 2 else x


# -- Hermite column form and integer solving --------------------------------------

def _col_op(A, U, i, j, a, b, c, d):
    # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
    for M in (A, U):
        for row in M:
            x, y = row[i], row[j]
            row[i], row[j] = a * x + b * y, c * x + d * y


def hermite_column(A) -> tuple[Matrix, Matrix]:
    """Unimodular ``U`` with ``A U`` lower echelon (column Hermite style).

    Returns ``(H, U)``; pivots of ``H`` are positive.
    """
    H = to_lists(A)
    r = len(H)
    c = len(H[0]) if r else 0
    U = identity(c)
    col = 0
    for row in range(r):
        if col >= c:
            break
        for j in range(col + 1, c):
            if H[row][j] == 0:
                continue
            a, b = H[row][col], H[row][j]
            g, s, t = _xgcd(a, b)
            # [s, -b/g; t, a/g] has determinant (s a + t b)/g = 1
            _col_op(H, U, col, j, s, t, -b // g, a // g)
        if H[row][col] == 0:
            continue
        if H[row][col] < 0:
            for M in (H, U):
                for rr in M:
                    rr[col] = -rr[col]
        col += 1
    return H, U


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def solve_integer(A, b) -> Optional[list[int]]:
    """Some integer ``z`` with ``A z = b``, or ``None`` if none exists."""
    H, U = hermite_column(A)
    r = len(H)
    c = len(H[0]) if r else 0
    y = [0] * c
    col = 0
    for row in range(r):
        acc = int(b[row]) - sum(H[row][j] * y[j] for j in range(col))
        if col < c and H[row][col] != 0:
            if acc % H[row][col]:
                return None
            y[col] = acc // H[row][col]
            col += 1
        elif acc != 0:
            return None
    return [sum(U[i][j] * y[j] for j in range(c)) for i in range(c)]
