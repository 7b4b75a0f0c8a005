"""Integer polynomials and polynomial matrices in one variable ``xi``.

A polynomial is a tuple of ints in ascending degree with no trailing zeros
(the zero polynomial is ``()``).  A polynomial matrix is a list of rows of
polynomials.  Everything stays in exact integer arithmetic: the only
divisions are by monic polynomials and are checked to be exact.
"""
from __future__ import annotations

Poly = tuple


def trim(a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def const(c: int) -> Poly:
    return trim((int(c),))


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return trim(out)


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pneg(b))


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def pscale(a: Poly, c: int) -> Poly:
    return trim(x * c for x in a)


def ppow(a: Poly, k: int) -> Poly:
    out = (1,)
    for _ in range(k):
        out = pmul(out, a)
    return out


class InexactDivision(ArithmeticError):
    pass


def pdiv_exact(a: Poly, d: Poly) -> Poly:
    """``a / d`` for monic ``d``; raises if the remainder is nonzero."""
    if not d or d[-1] != 1:
        raise ValueError("divisor must be monic")
    a = list(a)
    dd = len(d) - 1
    if len(a) <= dd:
        if any(a):
            raise InexactDivision("nonzero remainder")
        return ()
    q = [0] * (len(a) - dd)
    for i in range(len(a) - 1, dd - 1, -1):
        c = a[i]
        if c:
            q[i - dd] = c
            for j, y in enumerate(d):
                a[i - dd + j] -= c * y
    if any(a[:dd]):
        raise InexactDivision("nonzero remainder")
    return trim(q)


def peval0(a: Poly) -> int:
    return a[0] if a else 0


# -- polynomial matrices -------------------------------------------------------

def pm_zero(r: int, c: int):
    return [[() for _ in range(c)] for _ in range(r)]


def pm_const(M):
    return [[const(x) for x in row] for row in M]


def pm_identity(n: int, p: Poly = (1,)):
    return [[p if i == j else () for j in range(n)] for i in range(n)]


def pm_add(A, B):
    return [[padd(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def pm_sub(A, B):
    return [[psub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def pm_mul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = pm_zero(len(A), cols)
    for i, row in enumerate(A):
        for k in range(inner):
            a = row[k]
            if not a:
                continue
            Bk = B[k]
            o = out[i]
            for j in range(cols):
                if Bk[j]:
                    o[j] = padd(o[j], pmul(a, Bk[j]))
    return out


def pm_scale(A, p: Poly):
    return [[pmul(p, x) for x in row] for row in A]


def pm_div_exact(A, d: Poly):
    return [[pdiv_exact(x, d) for x in row] for row in A]


def pm_eval0(A):
    return [[peval0(x) for x in row] for row in A]


def pm_det_adj(A):
    """Determinant and adjugate of a small polynomial matrix by cofactors."""
    n = len(A)
    if n == 0:
        return (1,), []
    if n == 1:
        return A[0][0], [[(1,)]]
    minors = {}

    def det_rows(rows: tuple, cols: tuple) -> Poly:
        key = (rows, cols)
        if key in minors:
            return minors[key]
        if len(rows) == 1:
            val = A[rows[0]][cols[0]]
        else:
            val = ()
            r0, rest = rows[0], rows[1:]
            for k, c in enumerate(cols):
                a = A[r0][c]
                if a:
                    sub = det_rows(rest, cols[:k] + cols[k + 1:])
                    term = pmul(a, sub)
                    val = padd(val, term if k % 2 == 0 else pneg(term))
        minors[key] = val
        return val

    allr, allc = tuple(range(n)), tuple(range(n))
    det = det_rows(allr, allc)
    adj = pm_zero(n, n)
    for i in range(n):
        for j in range(n):
            m = det_rows(allr[:j] + allr[j + 1:], allc[:i] + allc[i + 1:])
            adj[i][j] = m if (i + j) % 2 == 0 else pneg(m)
    return det, adj


# -- characteristic matrices ------------------------------------------------------

def charpoly_adj(M):
    """``det(xi I - M)`` and ``adj(xi I - M)`` by Faddeev-LeVerrier.

    The recurrence ``B_0 = I``, ``c_k = -tr(M B_{k-1}) / k``,
    ``B_k = M B_{k-1} + c_k I`` stays integral for integer ``M``; then
    ``det = sum c_k xi^{l-k}`` and ``adj = sum B_k xi^{l-1-k}``.
    """
    l = len(M)
    M = [[int(x) for x in row] for row in M]
    if l == 0:
        return (1,), []
    B = [[int(i == j) for j in range(l)] for i in range(l)]
    Bs = [B]
    cs = [1]
    for k in range(1, l + 1):
        MB = [[sum(M[i][r] * B[r][j] for r in range(l)) for j in range(l)] for i in range(l)]
        tr = sum(MB[i][i] for i in range(l))
        if tr % k:
            raise InexactDivision("trace not divisible in Faddeev-LeVerrier")
        c = -tr // k
        cs.append(c)
        B = [[MB[i][j] + (c if i == j else 0) for j in range(l)] for i in range(l)]
        if k < l:
            Bs.append(B)
    # B after step l must vanish (Cayley-Hamilton)
    if any(x for row in B for x in row):
        raise ArithmeticError("Cayley-Hamilton check failed")
    d = trim(reversed(cs))
    adj = [[trim(Bs[l - 1 - e][i][j] for e in range(l)) for j in range(l)] for i in range(l)]
    return d, adj


def char_update(d: Poly, adj, U, C, V):
    """Charpoly and adjugate after ``xi I - M  ->  xi I - M + U C V``.

    ``U`` is ``l x t``, ``C`` is ``t x t`` and ``V`` is ``t x l`` (integer
    matrices).  With ``N = xi I - M`` and ``N^{-1} = adj / d``:

      X    = d I + C V adj U
      d'   = det X / d^{t-1}
      adj' = (d' adj - adj U adj(X) C V adj / d^{t-1}) / d

    which is the inverse update formula with every denominator cleared.
    """
    t = len(C)
    if t == 0:
        return d, adj
    Up, Cp, Vp = pm_const(U), pm_const(C), pm_const(V)
    CV = pm_mul(Cp, Vp)
    CVadj = pm_mul(CV, adj)
    adjU = pm_mul(adj, Up)
    X = pm_add(pm_identity(t, d), pm_mul(CVadj, Up))
    detX, adjX = pm_det_adj(X)
    dt1 = ppow(d, t - 1)
    d_new = pdiv_exact(detX, dt1)
    corr = pm_div_exact(pm_mul(pm_mul(adjU, adjX), CVadj), dt1)
    adj_new = pm_div_exact(pm_sub(pm_scale(adj, d_new), corr), d)
    return d_new, adj_new


def char_det_update(d: Poly, adj, U, V) -> Poly:
    """Charpoly only, after ``xi I - M  ->  xi I - M + U V``."""
    t = len(V)
    if t == 0:
        return d
    X = pm_add(pm_identity(t, d), pm_mul(pm_mul(pm_const(V), adj), pm_const(U)))
    detX, _ = pm_det_adj(X)
    return pdiv_exact(detX, ppow(d, t - 1))


def det_from_charpoly(d: Poly, l: int) -> int:
    return (-1) ** l * peval0(d)


def adj_from_charadj(adj, l: int):
    """Adjugate of ``M`` from the constant term of ``adj(xi I - M)``."""
    s = (-1) ** (l - 1)
    return [[s * peval0(x) for x in row] for row in adj]
