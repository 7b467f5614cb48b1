"""SL2 over F_p and F_p^2: trace map, Nielsen moves, towers, subgroup types."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .ff import (
    FieldElem,
    ParabolicInput,
    QuadElem,
    TraceClass,
    check_modulus,
    sqrt_mod,
    trace_split,
)
from .kernels import SL2Table, nielsen_labels, psl2_closure, sl2_table

Entry = Union[FieldElem, QuadElem]


class MixedField(ValueError):
    """Matrices over F_p and F_p^2 combined in one operation."""


class TooLarge(ValueError):
    """Requested computation exceeds the configured size budget."""


class InvariantViolation(RuntimeError):
    """A guaranteed mathematical property failed; indicates a bug."""


@dataclass(frozen=True, slots=True)
class Mat2:
    """2x2 matrix ``[[a, b], [c, d]]`` over F_p or F_p^2."""

    a: Entry
    b: Entry
    c: Entry
    d: Entry

    @classmethod
    def of(cls, p: int, a: int, b: int, c: int, d: int) -> "Mat2":
        return cls(FieldElem(a, p), FieldElem(b, p), FieldElem(c, p), FieldElem(d, p))

    @classmethod
    def identity(cls, p: int, quad: bool = False) -> "Mat2":
        m = cls.of(p, 1, 0, 0, 1)
        return m.lift() if quad else m

    @classmethod
    def from_ints(cls, p: int, entries) -> "Mat2":
        return cls.of(p, *(int(v) for v in entries))

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def is_quad(self) -> bool:
        return isinstance(self.a, QuadElem)

    def entries(self) -> tuple[Entry, Entry, Entry, Entry]:
        return self.a, self.b, self.c, self.d

    def to_ints(self) -> tuple[int, int, int, int]:
        return tuple(int(e.to_base() if isinstance(e, QuadElem) else e) for e in self.entries())

    def lift(self) -> "Mat2":
        if self.is_quad:
            return self
        return Mat2(*(e.lift() for e in self.entries()))

    def lower(self) -> "Mat2":
        """Same matrix over F_p; fails if an entry lies outside F_p."""
        if not self.is_quad:
            return self
        return Mat2(*(e.to_base() for e in self.entries()))

    def _check(self, other: "Mat2") -> None:
        if self.is_quad != other.is_quad:
            raise MixedField("operands over different base fields")
        if self.p != other.p:
            raise MixedField("operands over different primes")

    def __matmul__(self, other: "Mat2") -> "Mat2":
        self._check(other)
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    multiply = __matmul__

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def scale(self, s) -> "Mat2":
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    def det(self) -> Entry:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Entry:
        return self.a + self.d

    def inverse(self) -> "Mat2":
        """Inverse for unimodular matrices; general inverse otherwise."""
        det = self.det()
        adj = Mat2(self.d, -self.b, -self.c, self.a)
        if det == 1:
            return adj
        return adj.scale(det.inverse())

    def __pow__(self, n: int) -> "Mat2":
        if n < 0:
            return self.inverse() ** (-n)
        result = Mat2.identity(self.p, self.is_quad)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def frobenius(self) -> "Mat2":
        return Mat2(*(e.frobenius() for e in self.entries()))

    def is_identity(self) -> bool:
        return self.a == 1 and self.d == 1 and self.b == 0 and self.c == 0

    def is_central(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d and (self.a == 1 or self.a == -1)

    def is_el2_form(self) -> bool:
        """Entries ``[[x, y], [y^p, x^p]]`` with ``x^(p+1) - y^(p+1) = 1``."""
        if not self.is_quad:
            return False
        return (
            self.c == self.b.frobenius()
            and self.d == self.a.frobenius()
            and (self.a.norm() - self.b.norm()) % self.p == 1
        )

    def __repr__(self) -> str:
        def fmt(e):
            if isinstance(e, QuadElem):
                return f"{e.a0}+{e.a1}e" if e.a1 else str(e.a0)
            return str(e.value)

        return f"[[{fmt(self.a)}, {fmt(self.b)}], [{fmt(self.c)}, {fmt(self.d)}]] mod {self.p}"


def commutator(A: Mat2, B: Mat2) -> Mat2:
    """``[A, B] = A B A^-1 B^-1``."""
    return A @ B @ A.inverse() @ B.inverse()


def _scalar(e: Entry) -> int:
    return int(e.to_base()) if isinstance(e, QuadElem) else int(e)


class PairAB(NamedTuple):
    A: Mat2
    B: Mat2

    @property
    def p(self) -> int:
        return self.A.p

    def level(self) -> int:
        """Trace of the commutator, as a residue."""
        return _scalar(commutator(self.A, self.B).trace())

    def conjugate(self, X: Mat2) -> "PairAB":
        """``(X^-1 A X, X^-1 B X)``."""
        Xi = X.inverse()
        return PairAB(Xi @ self.A @ X, Xi @ self.B @ X)


def trace_map(pair: PairAB) -> tuple[int, int, int]:
    A, B = pair
    return _scalar(A.trace()), _scalar(B.trace()), _scalar((A @ B).trace())


def nielsen_r(pair: PairAB) -> PairAB:
    return PairAB(pair.B, pair.A)


def nielsen_s(pair: PairAB) -> PairAB:
    return PairAB(pair.A.inverse(), pair.A @ pair.B)


def nielsen_t(pair: PairAB) -> PairAB:
    return PairAB(pair.A.inverse(), pair.B)


# ---------------------------------------------------------------- towers


def _companion_witness(x: int, y: int, z: int, p: int) -> Optional[PairAB]:
    half = pow(2, -1, p)
    if all(v in (2, p - 2) for v in (x, y, z)):
        c, d = z * half % p, 0
    else:
        for c in range(p):
            lin = (x * c - y) % p
            const = (1 + c * c - z * c) % p
            r = sqrt_mod(lin * lin - 4 * const, p)
            if r is not None:
                d = min((-lin + r) * half % p, (-lin - r) * half % p)
                break
        else:
            return None
    a = (y - d) % p
    b = (d * x + c - z) % p
    return PairAB(Mat2.of(p, 0, 1, -1, x), Mat2.of(p, a, b, c, d))


def tower_witness(x: int, y: int, z: int, p: int) -> PairAB:
    """A pair whose trace triple is (x, y, z).

    The first matrix is ``A = [[0, 1], [-1, x]]``. Writing
    ``B = [[a, b], [c, d]]`` the conditions reduce to
    ``d^2 + (x c - y) d + (1 + c^2 - z c) = 0``; c is scanned upward and the
    smaller root d is taken. Triples with every coordinate equal to +-2 use
    the explicit solution ``c = z/2, d = 0``.

    A parabolic x may leave no solution with A of this shape. Then a
    non-parabolic coordinate is moved to the front, solved there, and moved
    back with Nielsen moves, so A is no longer the companion matrix.
    """
    check_modulus(p)
    x, y, z = x % p, y % p, z % p
    pair = _companion_witness(x, y, z, p)
    if pair is None:
        if y not in (2, p - 2):
            inner = _companion_witness(y, x, z, p)
            pair = None if inner is None else nielsen_r(inner)
        elif z not in (2, p - 2):
            inner = _companion_witness(z, x, y, p)
            pair = None if inner is None else nielsen_s(nielsen_r(inner))
    if pair is None:
        raise InvariantViolation(f"empty tower over {(x, y, z)} mod {p}")
    if trace_map(pair) != (x, y, z) or pair.B.det() != 1 or pair.A.det() != 1:
        raise InvariantViolation(f"bad witness for {(x, y, z)} mod {p}")
    return pair


def _table_or_raise(p: int) -> SL2Table:
    check_modulus(p)
    if p > SL2Table.MAX_P:
        raise TooLarge(f"p={p} exceeds the exhaustive pair budget (p <= {SL2Table.MAX_P})")
    return sl2_table(p)


def tower_indices(x: int, y: int, z: int, p: int) -> np.ndarray:
    """Table indices ``(iA, iB)`` of every pair over (x, y, z), shape (m, 2)."""
    T = _table_or_raise(p)
    ia = np.nonzero(T.trace == x % p)[0]
    ib = np.nonzero(T.trace == y % p)[0]
    prod = T.mult[ia[:, None], ib[None, :]]
    hit = T.trace[prod] == z % p
    ra, rb = np.nonzero(hit)
    return np.stack([ia[ra], ib[rb]], axis=1)


def tower_enumerate(x: int, y: int, z: int, p: int) -> list[PairAB]:
    """Every pair in SL2(F_p)^2 over (x, y, z). Small p only."""
    T = _table_or_raise(p)
    return [
        PairAB(Mat2.from_ints(p, T.elems[i]), Mat2.from_ints(p, T.elems[j]))
        for i, j in tower_indices(x, y, z, p)
    ]


def conjugacy_class_count(pairs: np.ndarray, p: int) -> int:
    """Number of SL2(F_p)-conjugacy classes among pairs given as table indices."""
    T = _table_or_raise(p)
    X = np.arange(T.n)[:, None]
    Xi = T.inv[X]
    a = T.mult[T.mult[Xi, pairs[None, :, 0]], X]
    b = T.mult[T.mult[Xi, pairs[None, :, 1]], X]
    keys = (a.astype(np.int64) * T.n + b).min(axis=0)
    return len(np.unique(keys))


# ---------------------------------------------------------------- normal pairs


def _eigvec(M: Mat2, lam: Entry) -> tuple[Entry, Entry]:
    if not M.b.is_zero():
        return M.b, lam - M.a
    if not M.c.is_zero():
        return lam - M.d, M.c
    one, zero = lam * 0 + 1, lam * 0
    return (one, zero) if M.a == lam else (zero, one)


def normalizing_conjugator(A: Mat2) -> Mat2:
    """X with ``X^-1 A X = diag(u, 1/u)``, u the root from :func:`trace_split`.

    Over F_p (hyperbolic trace) X has determinant 1. For elliptic traces X
    lives over F_p^2 and its columns are Frobenius conjugates, which makes
    the conjugated pair land in EL2 form.
    """
    u, cls = trace_split(_scalar(A.trace()), A.p)
    if cls is TraceClass.HYPERBOLIC:
        v = _eigvec(A.lower(), u)
        w = _eigvec(A.lower(), u.inverse())
        X = Mat2(v[0], w[0], v[1], w[1])
        return Mat2(X.a, X.b * X.det().inverse(), X.c, X.d * X.det().inverse())
    v = _eigvec(A.lift(), u)
    return Mat2(v[0], v[0].frobenius(), v[1], v[1].frobenius())


def normal_form(pair: PairAB) -> PairAB:
    """Conjugate pair ``(D_u, C)`` with diagonal first matrix."""
    if _scalar(pair.A.trace()) in (2, pair.p - 2):
        raise ParabolicInput("first matrix is parabolic")
    X = normalizing_conjugator(pair.A)
    if X.is_quad:
        pair = PairAB(pair.A.lift(), pair.B.lift())
    return pair.conjugate(X)


def el2_conjugator(p: int) -> Mat2:
    """``P = [[1, g], [1, g^p]]`` with g the adjoined square root of the non-residue."""
    g = QuadElem.eps(p)
    one = QuadElem(1, 0, p)
    return Mat2(one, g, one, g.frobenius())


def el2_embed(M: Mat2) -> Mat2:
    P = el2_conjugator(M.p)
    return P @ M.lift() @ P.inverse()


# ---------------------------------------------------------------- orders and subgroups


def psl2_order(M: Mat2) -> int:
    """Smallest h >= 1 with ``M^h = +-I``."""
    cur = M
    for h in range(1, 2 * M.p + 3):
        if cur.is_central():
            return h
        cur = cur @ M
    raise InvariantViolation("element order exceeds the PSL2 bound")


@dataclass(frozen=True)
class GroupClass:
    """Type of the subgroup of PSL2(F_p) generated by a pair."""

    tag: str  # Affine, Dihedral, Tetrahedral, Octahedral, Icosahedral, Projective
    n: Optional[int] = None  # dihedral index
    size: Optional[int] = None  # closure size in PSL2

    def __str__(self) -> str:
        return f"Dihedral({self.n})" if self.tag == "Dihedral" else self.tag


def psl2_size(p: int) -> int:
    return p * (p * p - 1) // 2


def exceptional_bound(p: int) -> int:
    return max(60, 2 * (p + 1))


def _canon(m: tuple[int, int, int, int], p: int) -> tuple[int, int, int, int]:
    neg = tuple((-v) % p for v in m)
    return min(m, neg)


def _mul(m, n, p):
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def _closure_generic(gens, p: int, bound: int) -> tuple[list, bool]:
    start = _canon((1, 0, 0, 1), p)
    seen = {start}
    queue = [start]
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        for g in gens:
            y = _canon(_mul(x, g, p), p)
            if y not in seen:
                seen.add(y)
                queue.append(y)
                if len(queue) > bound:
                    return queue, True
    return queue, False


def _order_generic(m, p: int) -> int:
    cur = m
    for h in range(1, 2 * p + 3):
        if cur[1] == 0 and cur[2] == 0 and cur[0] == cur[3] and cur[0] in (1, p - 1):
            return h
        cur = _mul(cur, m, p)
    raise InvariantViolation("element order exceeds the PSL2 bound")


MAX_CLOSURE_P = 50_000


def _identify(size: int, orders: set[int], p: int) -> GroupClass:
    top = max(orders)
    if size == 2 and top == 2:
        return GroupClass("Dihedral", 1, 2)
    if size == 2 * top and size > 2:
        return GroupClass("Dihedral", top, size)
    if size == 12 and orders <= {1, 2, 3}:
        return GroupClass("Tetrahedral", size=12)
    if size == 24 and 4 in orders and orders <= {1, 2, 3, 4}:
        return GroupClass("Octahedral", size=24)
    if size == 60 and orders <= {1, 2, 3, 5}:
        return GroupClass("Icosahedral", size=60)
    raise InvariantViolation(f"unrecognised non-affine subgroup of order {size} mod {p}")


def classify_pair(pair: PairAB) -> GroupClass:
    """Subgroup type generated by a pair in PSL2(F_p).

    Level 2 is affine exactly. Otherwise the closure runs until it exceeds
    ``max(60, 2(p+1))`` elements, past which only PSL2(F_p) itself remains.
    """
    p = pair.p
    A, B = pair.A.lower(), pair.B.lower()
    if p > MAX_CLOSURE_P:
        raise TooLarge(f"p={p} exceeds the closure budget")
    affine = PairAB(A, B).level() == 2
    bound = psl2_size(p) if affine else exceptional_bound(p)
    if p <= SL2Table.MAX_P:
        T = sl2_table(p)
        gens = T.index(np.array([A.to_ints(), B.to_ints()]))
        members, exceeded = psl2_closure(T, gens, bound)
        if affine:
            return GroupClass("Affine", size=len(members))
        if exceeded:
            return GroupClass("Projective", size=psl2_size(p))
        orders = T.psl2_orders_cached()[members]
        return _identify(len(members), set(int(h) for h in orders), p)
    if affine:
        return GroupClass("Affine")
    members, exceeded = _closure_generic([A.to_ints(), B.to_ints()], p, bound)
    if exceeded:
        return GroupClass("Projective", size=psl2_size(p))
    return _identify(len(members), {_order_generic(m, p) for m in members}, p)


def nielsen_classes(p: int, k: int) -> list[tuple[int, int, GroupClass]]:
    """Nielsen classes of pairs at level k: ``(size, representative code, class)``."""
    T = _table_or_raise(p)
    codes = np.flatnonzero(T.commutator_trace() == k % p).astype(np.int64)
    if codes.size == 0:
        return []
    labels = nielsen_labels(T, codes)
    roots, sizes = np.unique(labels, return_counts=True)
    out = []
    for root, size in zip(roots, sizes):
        ia, ib = divmod(int(codes[root]), T.n)
        pair = PairAB(Mat2.from_ints(p, T.elems[ia]), Mat2.from_ints(p, T.elems[ib]))
        out.append((int(size), int(codes[root]), classify_pair(pair)))
    return out


def nielsen_class_count(p: int, k: int) -> int:
    """Number of Nielsen classes of generating pairs with ``tr[A, B] = k``."""
    return sum(1 for _, _, cls in nielsen_classes(p, k) if cls.tag == "Projective")


# ---------------------------------------------------------------- batched pairs
# Matrices as int64 arrays of shape (n, 4) holding (a, b, c, d) mod p.


def batch_mul(X: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    a, b, c, d = X.T
    e, f, g, h = Y.T
    return np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=1) % p


def batch_inv(X: np.ndarray, p: int) -> np.ndarray:
    a, b, c, d = X.T
    return np.stack([d, -b, -c, a], axis=1) % p


def batch_trace(X: np.ndarray, p: int) -> np.ndarray:
    return (X[:, 0] + X[:, 3]) % p


def batch_trace_map(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    return np.stack([batch_trace(A, p), batch_trace(B, p), batch_trace(batch_mul(A, B, p), p)], axis=1)


def batch_level(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """``tr[A, B]`` for each row."""
    comm = batch_mul(batch_mul(A, B, p), batch_mul(batch_inv(A, p), batch_inv(B, p), p), p)
    return batch_trace(comm, p)


def batch_nielsen(A: np.ndarray, B: np.ndarray, move: str, p: int) -> tuple[np.ndarray, np.ndarray]:
    if move == "r":
        return B, A
    if move == "s":
        return batch_inv(A, p), batch_mul(A, B, p)
    if move == "t":
        return batch_inv(A, p), B
    raise ValueError(f"unknown move {move!r}")


def random_sl2(rng: np.random.Generator, n: int, p: int) -> np.ndarray:
    """``n`` uniform samples from SL2(F_p), by rejection on the determinant."""
    out = np.empty((0, 4), dtype=np.int64)
    while out.shape[0] < n:
        m = rng.integers(0, p, size=(max(n - out.shape[0], 64) * (p + 2), 4), dtype=np.int64)
        keep = (m[:, 0] * m[:, 3] - m[:, 1] * m[:, 2]) % p == 1
        out = np.concatenate([out, m[keep]])
    return out[:n]
