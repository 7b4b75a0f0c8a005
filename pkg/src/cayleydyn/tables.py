"""Cayley tables: storage, text I/O, structure validation and generators.

Elements are the indices ``0..n-1``; ``op[i, j]`` is the product of ``i`` and
``j``.  Tables are immutable once built.
"""
from __future__ import annotations

import enum
import hashlib
import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class Structure(enum.IntEnum):
    MAGMA = 0
    MONOID = 1
    COMMUTATIVE_MONOID = 2
    GROUP = 3
    ABELIAN_GROUP = 4


@dataclass(frozen=True)
class StructureClass:
    tag: Structure
    identity: Optional[int] = None

    @property
    def is_monoid(self) -> bool:
        return self.tag >= Structure.MONOID

    @property
    def is_abelian_group(self) -> bool:
        return self.tag == Structure.ABELIAN_GROUP


class TableError(ValueError):
    pass


class CayleyTable:
    """An ``n x n`` operation table over ``{0..n-1}``."""

    __slots__ = ("op", "n", "_digest")

    def __init__(self, op):
        arr = np.array(op, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise TableError(f"table must be a non-empty square array, got shape {arr.shape}")
        n = arr.shape[0]
        if arr.min() < 0 or arr.max() >= n:
            raise TableError("table entries must lie in 0..n-1")
        arr.setflags(write=False)
        self.op = arr
        self.n = n
        self._digest = None

    def mul(self, a: int, b: int) -> int:
        return int(self.op[a, b])

    def digest(self) -> str:
        if self._digest is None:
            self._digest = hashlib.sha256(self.op.astype(np.int32).tobytes()).hexdigest()
        return self._digest

    def __eq__(self, other):
        return isinstance(other, CayleyTable) and self.n == other.n and bool(np.array_equal(self.op, other.op))

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return f"CayleyTable(n={self.n})"

    def with_entries(self, changes) -> "CayleyTable":
        """Copy of the table with ``(i, j, value)`` cells overwritten."""
        arr = self.op.copy()
        for i, j, v in changes:
            arr[i, j] = v
        return CayleyTable(arr)

    def relabel(self, perm: Sequence[int]) -> "CayleyTable":
        """Isomorphic copy where old element ``x`` becomes ``perm[x]``."""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.n)
        # new(a, b) = perm[old(inv a, inv b)]
        return CayleyTable(perm[self.op[np.ix_(inv, inv)]])

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines.extend(" ".join(str(int(v)) for v in row) for row in self.op)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CayleyTable":
        rows = [ln.strip() for ln in text.splitlines()]
        rows = [ln for ln in rows if ln and not ln.startswith("#")]
        if not rows:
            raise TableError("empty table file")
        try:
            n = int(rows[0])
            body = [[int(tok) for tok in ln.split()] for ln in rows[1:]]
        except ValueError as exc:
            raise TableError(f"malformed table: {exc}") from None
        if n < 1 or len(body) != n or any(len(r) != n for r in body):
            raise TableError(f"expected {n} rows of {n} entries")
        return cls(body)

    @classmethod
    def load(cls, path) -> "CayleyTable":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())


# -- validation ---------------------------------------------------------------

def find_two_sided_identity(t: CayleyTable) -> Optional[int]:
    idx = np.arange(t.n)
    for e in range(t.n):
        if np.array_equal(t.op[e], idx) and np.array_equal(t.op[:, e], idx):
            return e
    return None


def is_associative(t: CayleyTable) -> bool:
    op = t.op
    for i in range(t.n):
        # (i*j)*k == i*(j*k) for all j, k
        if not np.array_equal(op[op[i]], op[i][op]):
            return False
    return True


def validate_table(t: CayleyTable) -> StructureClass:
    """Return the strongest structure tag the table satisfies."""
    e = find_two_sided_identity(t)
    if e is None or not is_associative(t):
        return StructureClass(Structure.MAGMA, e)
    commutative = bool(np.array_equal(t.op, t.op.T))
    # every row containing e means every element has a right inverse; in a
    # finite monoid that is enough for a group
    has_inverses = bool(np.all((t.op == e).any(axis=1)))
    if has_inverses:
        tag = Structure.ABELIAN_GROUP if commutative else Structure.GROUP
    else:
        tag = Structure.COMMUTATIVE_MONOID if commutative else Structure.MONOID
    return StructureClass(tag, e)


# -- generators ---------------------------------------------------------------

def cyclic(n: int) -> CayleyTable:
    if n < 1:
        raise TableError("cyclic group order must be positive")
    i = np.arange(n)
    return CayleyTable((i[:, None] + i[None, :]) % n)


def direct_product(a: CayleyTable, b: CayleyTable) -> CayleyTable:
    """Product table with ``(x, y)`` stored at index ``x * |b| + y``."""
    na, nb = a.n, b.n
    x = np.arange(na * nb) // nb
    y = np.arange(na * nb) % nb
    op = a.op[np.ix_(x, x)] * nb + b.op[np.ix_(y, y)]
    return CayleyTable(op)


def abelian_from_invariants(orders: Sequence[int]) -> CayleyTable:
    """Direct product of cyclic groups of the given orders (empty -> trivial)."""
    t = cyclic(1)
    for o in orders:
        t = direct_product(t, cyclic(int(o))) if t.n > 1 else cyclic(int(o))
    return t


def symmetric3() -> CayleyTable:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    op = [[index[tuple(p[q[k]] for k in range(3))] for q in perms] for p in perms]
    return CayleyTable(op)


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def partitions(a: int, largest: Optional[int] = None):
    """Integer partitions of ``a`` as non-increasing tuples."""
    if largest is None:
        largest = a
    if a == 0:
        yield ()
        return
    for first in range(min(a, largest), 0, -1):
        for rest in partitions(a - first, first):
            yield (first,) + rest


def abelian_isomorphism_classes(n: int) -> list[tuple[int, ...]]:
    """Elementary-divisor style descriptions (prime-power cyclic orders) of every
    abelian group of order ``n``."""
    per_prime = []
    for p, a in factorize(n):
        per_prime.append([tuple(p ** k for k in part) for part in partitions(a)])
    if not per_prime:
        return [()]
    return [tuple(itertools.chain.from_iterable(c)) for c in itertools.product(*per_prime)]


def random_abelian(n: int, rng: np.random.Generator) -> CayleyTable:
    """A random abelian group of order ``n`` with shuffled element labels."""
    if n < 1:
        raise TableError("group order must be positive")
    classes = abelian_isomorphism_classes(n)
    orders = classes[int(rng.integers(len(classes)))]
    t = abelian_from_invariants(orders)
    return t.relabel(rng.permutation(n))


def random_magma(n: int, rng: np.random.Generator) -> CayleyTable:
    if n < 1:
        raise TableError("magma size must be positive")
    return CayleyTable(rng.integers(0, n, size=(n, n)))


# Small commutative monoids used to assemble random test instances.

def truncated_addition(k: int) -> CayleyTable:
    """``{0..k}`` under ``min(a + b, k)``: identity 0, absorbing ``k``."""
    i = np.arange(k + 1)
    return CayleyTable(np.minimum(i[:, None] + i[None, :], k))


def min_semilattice(k: int) -> CayleyTable:
    """``{0..k-1}`` under ``min``; the identity is ``k - 1``."""
    i = np.arange(k)
    return CayleyTable(np.minimum(i[:, None], i[None, :]))


def cyclic_monoid(index: int, period: int) -> CayleyTable:
    """Monogenic monoid ``<a | a^(index+period) = a^index>`` on ``index+period``
    elements ``a^0..a^(index+period-1)``."""
    size = index + period
    i = np.arange(size)
    s = i[:, None] + i[None, :]
    folded = np.where(s < size, s, index + (s - index) % period)
    return CayleyTable(folded)


def zero_semigroup(k: int) -> CayleyTable:
    """``k`` elements where every product is ``0`` (a commutative semigroup)."""
    return CayleyTable(np.zeros((k, k), dtype=np.int64))


def adjoin_identity(t: CayleyTable) -> CayleyTable:
    """Add a fresh identity element with index ``n``."""
    n = t.n
    op = np.empty((n + 1, n + 1), dtype=np.int64)
    op[:n, :n] = t.op
    op[n, :] = np.arange(n + 1)
    op[:, n] = np.arange(n + 1)
    return CayleyTable(op)


def random_commutative_monoid(max_n: int, rng: np.random.Generator) -> CayleyTable:
    """Random commutative monoid of order at most ``max_n``.

    Built as a direct product of 1-3 small factors drawn from cyclic groups,
    truncated-addition monoids, min-semilattices, monogenic monoids and zero
    semigroups with an adjoined identity, with shuffled labels.
    """
    while True:
        factors = []
        size = 1
        for _ in range(int(rng.integers(1, 4))):
            kind = int(rng.integers(5))
            if kind == 0:
                f = cyclic(int(rng.integers(2, 9)))
            elif kind == 1:
                f = truncated_addition(int(rng.integers(1, 7)))
            elif kind == 2:
                f = min_semilattice(int(rng.integers(2, 6)))
            elif kind == 3:
                f = cyclic_monoid(int(rng.integers(1, 4)), int(rng.integers(1, 5)))
            else:
                f = adjoin_identity(zero_semigroup(int(rng.integers(1, 5))))
            if size * f.n > max_n:
                continue
            factors.append(f)
            size *= f.n
        if not factors:
            continue
        t = factors[0]
        for f in factors[1:]:
            t = direct_product(t, f)
        return t.relabel(rng.permutation(t.n))


def parse_spec(spec: str, rng: np.random.Generator) -> CayleyTable:
    """Parse the generator grammar used by the CLI.

    ``cyclic:<n>``, ``product:<spec>x<spec>``, ``random-abelian:<n>``, ``s3``,
    ``random-magma:<n>``.
    """
    spec = spec.strip()
    if spec == "s3":
        return symmetric3()
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise TableError(f"unparseable table spec {spec!r}")
    if kind == "product":
        parts = _split_product(rest)
        if len(parts) < 2:
            raise TableError(f"product needs two factors: {spec!r}")
        t = parse_spec(parts[0], rng)
        for part in parts[1:]:
            t = direct_product(t, parse_spec(part, rng))
        return t
    try:
        n = int(rest)
    except ValueError:
        raise TableError(f"unparseable table spec {spec!r}") from None
    if n <= 0:
        raise TableError("order must be positive")
    if kind == "cyclic":
        return cyclic(n)
    if kind == "random-abelian":
        return random_abelian(n, rng)
    if kind == "random-magma":
        return random_magma(n, rng)
    raise TableError(f"unknown table kind {kind!r}")


def _split_product(rest: str) -> list[str]:
    # 'cyclic:2xcyclic:4' -> ['cyclic:2', 'cyclic:4']; 'x' separates factors
    # only where it is followed by a known kind.
    kinds = ("cyclic:", "product:", "random-abelian:", "random-magma:", "s3")
    parts, start = [], 0
    i = 0
    while i < len(rest):
        if rest[i] == "x" and any(rest.startswith(k, i + 1) for k in kinds):
            parts.append(rest[start:i])
            start = i + 1
        i += 1
    parts.append(rest[start:])
    return parts


def ceil_log2(n: int) -> int:
    return max(0, math.ceil(math.log2(n))) if n > 1 else 0
