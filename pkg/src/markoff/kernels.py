"""Hot numeric kernels.

Every kernel has two implementations: a loop version compiled with numba
and a vectorised numpy version (or, for inherently sequential searches, the
same loop run by the interpreter). ``MARKOFF_NO_NUMBA=1`` selects the numpy
path; see :mod:`markoff._accel`.

Triples are packed as ``x + p*y + p*p*z``; SL2 elements are rows of an
``(N, 4)`` table ``(a, b, c, d)`` sorted by ``a + p*b + p^2*c + p^3*d``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._accel import USE_NUMBA, njit
from .ff import sqrt_table

# --------------------------------------------------------------------------
# level enumeration


@njit
def _level_codes_loop(p, k, sq):
    out = np.empty(2 * p * p, dtype=np.int64)
    n = 0
    inv2 = (p + 1) // 2
    pp = p * p
    for x in range(p):
        for y in range(p):
            b = x * y % p
            c = (x * x + y * y - 2 - k) % p
            r = sq[(b * b - 4 * c) % p]
            if r < 0:
                continue
            out[n] = x + p * y + pp * ((b + r) * inv2 % p)
            n += 1
            if r != 0:
                out[n] = x + p * y + pp * ((b - r + p) * inv2 % p)
                n += 1
    res = out[:n].copy()
    res.sort()
    return res


def _level_codes_numpy(p, k, sq):
    x, y = np.divmod(np.arange(p * p, dtype=np.int64), p)
    b = x * y % p
    c = (x * x + y * y - 2 - k) % p
    r = sq[(b * b - 4 * c) % p]
    ok = r >= 0
    x, y, b, r = x[ok], y[ok], b[ok], r[ok]
    inv2 = (p + 1) // 2
    base = x + p * y
    z1 = (b + r) * inv2 % p
    two = r != 0
    z2 = (b[two] - r[two] + p) * inv2 % p
    codes = np.concatenate([base + p * p * z1, base[two] + p * p * z2])
    codes.sort()
    return codes


def level_codes(p: int, k: int) -> np.ndarray:
    """Sorted codes of every solution of the level-k cubic over F_p."""
    sq = sqrt_table(p)
    if USE_NUMBA:
        return _level_codes_loop(p, k % p, sq)
    return _level_codes_numpy(p, k % p, sq)


def decode(codes: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = codes % p
    y = (codes // p) % p
    z = codes // (p * p)
    return x, y, z


def encode(x, y, z, p: int):
    return x + p * y + p * p * z


def move_codes(codes: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Images of packed triples under r, s and the Vieta move in z."""
    x, y, z = decode(codes, p)
    r = encode(y, x, z, p)
    s = encode(x, z, y, p)
    t = encode(x, y, (x * y - z) % p, p)
    return r, s, t


# --------------------------------------------------------------------------
# connected components; labels are the smallest node index of each component


@njit
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit
def _components_uf(n, u, v):
    parent = np.arange(n)
    for e in range(u.shape[0]):
        a = _find(parent, u[e])
        b = _find(parent, v[e])
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        labels[i] = _find(parent, i)
    return labels


def _components_numpy(n, u, v):
    labels = np.arange(n, dtype=np.int64)
    while True:
        lu, lv = labels[u], labels[v]
        if np.array_equal(lu, lv):
            return labels
        m = np.minimum(lu, lv)
        hooked = labels.copy()
        np.minimum.at(hooked, lu, m)
        np.minimum.at(hooked, lv, m)
        while True:
            jumped = hooked[hooked]
            if np.array_equal(jumped, hooked):
                break
            hooked = jumped
        labels = hooked


def connected_components(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = np.ascontiguousarray(u, dtype=np.int64)
    v = np.ascontiguousarray(v, dtype=np.int64)
    if USE_NUMBA:
        return _components_uf(n, u, v)
    return _components_numpy(n, u, v)


def orbit_labels(codes: np.ndarray, p: int) -> np.ndarray:
    """Component label of each (sorted) triple under the r, s, t moves."""
    n = codes.shape[0]
    idx = np.arange(n, dtype=np.int64)
    us, vs = [], []
    for img in move_codes(codes, p):
        j = np.searchsorted(codes, img)
        if np.any(j >= n) or np.any(codes[np.minimum(j, n - 1)] != img):
            raise AssertionError("move left the level")
        us.append(idx)
        vs.append(j)
    return connected_components(n, np.concatenate(us), np.concatenate(vs))


def component_sizes(labels: np.ndarray) -> dict[int, int]:
    roots, counts = np.unique(labels, return_counts=True)
    return {int(r): int(c) for r, c in zip(roots, counts)}


# --------------------------------------------------------------------------
# SL2(F_p) tables


class SL2Table:
    """Enumerated SL2(F_p) with multiplication, inverse and sign tables.

    Intended for small p only: the multiplication table has N^2 entries,
    N = p(p^2 - 1).
    """

    MAX_P = 13

    def __init__(self, p: int):
        if p > self.MAX_P:
            raise ValueError(f"SL2 table limited to p <= {self.MAX_P}")
        self.p = p
        a, b, c, d = np.meshgrid(*(np.arange(p, dtype=np.int64),) * 4, indexing="ij")
        a, b, c, d = (arr.ravel() for arr in (a, b, c, d))
        keep = (a * d - b * c) % p == 1
        elems = np.stack([a[keep], b[keep], c[keep], d[keep]], axis=1)
        codes = self._codes(elems)
        order = np.argsort(codes)
        self.elems = elems[order]
        self.codes = codes[order]
        self.n = len(self.elems)
        lookup = np.full(p**4, -1, dtype=np.int64)
        lookup[self.codes] = np.arange(self.n)
        self._lookup = lookup

        e = self.elems
        self.trace = (e[:, 0] + e[:, 3]) % p
        self.inv = self.index(np.stack([e[:, 3], -e[:, 1], -e[:, 2], e[:, 0]], axis=1) % p)
        self.neg = self.index((-e) % p)
        self.mult = self._mult_table()
        self.identity = int(self.index(np.array([[1, 0, 0, 1]]))[0])
        self.minus_identity = int(self.neg[self.identity])
        # canonical PSL2 representative: the index with the smaller code
        self.canon = np.minimum(np.arange(self.n), self.neg)
        self._orders = None

    def _codes(self, elems):
        p = self.p
        return elems[:, 0] + p * elems[:, 1] + p * p * elems[:, 2] + p**3 * elems[:, 3]

    def index(self, elems) -> np.ndarray:
        elems = np.asarray(elems, dtype=np.int64) % self.p
        return self._lookup[self._codes(elems.reshape(-1, 4))]

    def _mult_table(self):
        p, e, n = self.p, self.elems, self.n
        table = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            a, b, c, d = e[i]
            prod = np.stack(
                [
                    a * e[:, 0] + b * e[:, 2],
                    a * e[:, 1] + b * e[:, 3],
                    c * e[:, 0] + d * e[:, 2],
                    c * e[:, 1] + d * e[:, 3],
                ],
                axis=1,
            ) % p
            table[i] = self._lookup[self._codes(prod)]
        return table

    def commutator_trace(self) -> np.ndarray:
        """``tr(A B A^-1 B^-1)`` for every ordered pair, as an (N, N) array."""
        ainv_binv = self.mult[self.inv[:, None], self.inv[None, :]]
        return self.trace[self.mult[self.mult, ainv_binv]]

    def psl2_orders(self) -> np.ndarray:
        """Order in PSL2 of every element."""
        n = self.n
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        central = (self.identity, self.minus_identity)
        for h in range(1, 2 * self.p + 3):
            done = (orders == 0) & np.isin(cur, central)
            orders[done] = h
            if orders.all():
                break
            cur = self.mult[cur, np.arange(n)]
        return orders

    def psl2_orders_cached(self) -> np.ndarray:
        if self._orders is None:
            self._orders = self.psl2_orders()
        return self._orders


@lru_cache(maxsize=4)
def sl2_table(p: int) -> SL2Table:
    return SL2Table(p)


@njit
def _psl2_closure(mult, canon, start, gens, bound):
    n = mult.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    seen[start] = True
    queue[0] = start
    head, tail = 0, 1
    while head < tail:
        x = queue[head]
        head += 1
        for g in gens:
            y = canon[mult[x, g]]
            if not seen[y]:
                seen[y] = True
                queue[tail] = y
                tail += 1
                if tail > bound:
                    return queue[:tail].copy(), True
    return queue[:tail].copy(), False


def psl2_closure(table: SL2Table, gens, bound: int) -> tuple[np.ndarray, bool]:
    """PSL2 closure of ``gens`` (table indices) with early exit above ``bound``."""
    gens = np.asarray([table.canon[g] for g in gens], dtype=np.int64)
    start = int(table.canon[table.identity])
    return _psl2_closure(table.mult, table.canon, start, gens, bound)


def nielsen_labels(table: SL2Table, pairs: np.ndarray) -> np.ndarray:
    """Nielsen classes of a move-closed set of pair codes ``A*N + B`` (sorted)."""
    n_el = table.n
    a, b = np.divmod(pairs, n_el)
    ainv = table.inv[a]
    images = (
        b * n_el + a,  # r
        ainv * n_el + table.mult[a, b],  # s
        ainv * n_el + b,  # t
    )
    m = pairs.shape[0]
    idx = np.arange(m, dtype=np.int64)
    us, vs = [], []
    for img in images:
        j = np.searchsorted(pairs, img)
        if np.any(j >= m) or np.any(pairs[np.minimum(j, m - 1)] != img):
            raise AssertionError("Nielsen move left the pair set")
        us.append(idx)
        vs.append(j)
    return connected_components(m, np.concatenate(us), np.concatenate(vs))
