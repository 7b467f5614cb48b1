"""Arithmetic in F_p and F_p^2 and the trace trichotomy.

Residues are canonical integers in ``[0, p)``. ``F_p^2`` is modelled as
``F_p[eps]/(eps^2 - nu)`` with ``nu`` the smallest positive non-residue.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np


class ConfigError(ValueError):
    """Modulus outside the supported range (must be a prime > 5)."""


class ParabolicInput(ValueError):
    """Operation undefined for traces +2 and -2."""


class TraceClass(enum.Enum):
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"
    ELLIPTIC = "Elliptic"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=None)
def check_modulus(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or p <= 5 or not is_prime(int(p)):
        raise ConfigError("p must be prime > 5")
    return int(p)


def primes_between(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1) if is_prime(q)]


def legendre(a: int, p: int) -> int:
    """Legendre symbol via Euler's criterion; 0 for a = 0 mod p."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod p."""
    n = 2
    while legendre(n, p) != -1:
        n += 1
    return n


def _tonelli_shanks(a: int, p: int) -> int:
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = nonresidue(p)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """Smaller of the two square roots of ``a`` mod ``p``, or None."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        r = _tonelli_shanks(a, p)
    return min(r, p - r)


def classify_trace(t: int, p: int) -> TraceClass:
    t %= p
    if t == 2 or t == p - 2:
        return TraceClass.PARABOLIC
    if legendre(t * t - 4, p) == 1:
        return TraceClass.HYPERBOLIC
    return TraceClass.ELLIPTIC


@lru_cache(maxsize=64)
def sqrt_table(p: int) -> np.ndarray:
    """``table[a]`` = canonical square root of a, or -1 for non-squares.

    Built by squaring every residue, so it is independent of ``sqrt_mod``.
    """
    table = np.full(p, -1, dtype=np.int64)
    # r <= (p-1)/2 is always the smaller root of r^2, and these squares are distinct
    r = np.arange((p + 1) // 2, dtype=np.int64)
    table[(r * r) % p] = r
    table.flags.writeable = False
    return table


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    sq = sqrt_table(p)
    out = np.where(sq >= 0, 1, -1).astype(np.int64)
    out[0] = 0
    out.flags.writeable = False
    return out


Scalar = Union[int, "FieldElem"]


@dataclass(frozen=True, slots=True)
class FieldElem:
    """A residue of F_p."""

    value: int
    p: int

    def __post_init__(self) -> None:
        check_modulus(self.p)
        object.__setattr__(self, "value", int(self.value) % self.p)

    def _coerce(self, other) -> Optional[int]:
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise ValueError("elements of different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.p
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value, self.p)

    def inverse(self) -> "FieldElem":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * FieldElem(o, self.p).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElem(pow(self.value, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, QuadElem):
            return other == self
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"

    def is_zero(self) -> bool:
        return self.value == 0

    def legendre(self) -> int:
        return legendre(self.value, self.p)

    def sqrt(self) -> Optional["FieldElem"]:
        r = sqrt_mod(self.value, self.p)
        return None if r is None else FieldElem(r, self.p)

    def trace_class(self) -> TraceClass:
        return classify_trace(self.value, self.p)

    def lift(self) -> "QuadElem":
        return QuadElem(self.value, 0, self.p)

    def frobenius(self) -> "FieldElem":
        return self


@dataclass(frozen=True, slots=True)
class QuadElem:
    """``a0 + a1*eps`` in F_p^2 with ``eps^2 = nonresidue(p)``."""

    a0: int
    a1: int
    p: int

    def __post_init__(self) -> None:
        check_modulus(self.p)
        object.__setattr__(self, "a0", int(self.a0) % self.p)
        object.__setattr__(self, "a1", int(self.a1) % self.p)

    @classmethod
    def eps(cls, p: int) -> "QuadElem":
        return cls(0, 1, p)

    def _coerce(self, other) -> Optional[tuple[int, int]]:
        if isinstance(other, QuadElem):
            if other.p != self.p:
                raise ValueError("elements of different fields")
            return other.a0, other.a1
        if isinstance(other, FieldElem):
            if other.p != self.p:
                raise ValueError("elements of different fields")
            return other.value, 0
        if isinstance(other, (int, np.integer)):
            return int(other) % self.p, 0
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.a0 + o[0], self.a1 + o[1], self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.a0 - o[0], self.a1 - o[1], self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(o[0] - self.a0, o[1] - self.a1, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        b0, b1 = o
        nu = nonresidue(self.p)
        return QuadElem(
            self.a0 * b0 + nu * self.a1 * b1,
            self.a0 * b1 + self.a1 * b0,
            self.p,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return QuadElem(-self.a0, -self.a1, self.p)

    def norm(self) -> int:
        """``w * w^p``, an element of F_p."""
        return (self.a0 * self.a0 - nonresidue(self.p) * self.a1 * self.a1) % self.p

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.a0, -self.a1, self.p)

    frobenius = conjugate

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("0 has no inverse")
        n_inv = pow(n, -1, self.p)
        return QuadElem(self.a0 * n_inv, -self.a1 * n_inv, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * QuadElem(o[0], o[1], self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(o[0], o[1], self.p) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadElem(1, 0, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return (self.a0, self.a1, self.p) == (other.a0, other.a1, other.p)
        if isinstance(other, FieldElem):
            return self.p == other.p and self.a1 == 0 and self.a0 == other.value
        if isinstance(other, (int, np.integer)):
            return self.a1 == 0 and self.a0 == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        if self.a1 == 0:
            return hash((self.a0, self.p))
        return hash((self.a0, self.a1, self.p))

    def __repr__(self):
        return f"({self.a0} + {self.a1}e) (mod {self.p})"

    def is_zero(self) -> bool:
        return self.a0 == 0 and self.a1 == 0

    def in_base(self) -> bool:
        return self.a1 == 0

    def to_base(self) -> FieldElem:
        if self.a1:
            raise ValueError(f"{self!r} is not in F_p")
        return FieldElem(self.a0, self.p)


def trace_split(t: Scalar, p: Optional[int] = None) -> tuple[Union[FieldElem, QuadElem], TraceClass]:
    """Root ``u`` of ``u^2 - t*u + 1``, so that ``u + 1/u = t``.

    ``u = (t + s)/2`` where ``s`` is the canonical square root of
    ``t^2 - 4`` (taken in F_p^2 as ``r*eps`` when t is elliptic).
    """
    if isinstance(t, FieldElem):
        p, t = t.p, t.value
    if p is None:
        raise TypeError("modulus required for an integer trace")
    check_modulus(p)
    t %= p
    cls = classify_trace(t, p)
    if cls is TraceClass.PARABOLIC:
        raise ParabolicInput(f"trace {t} is parabolic mod {p}")
    half = pow(2, -1, p)
    disc = (t * t - 4) % p
    if cls is TraceClass.HYPERBOLIC:
        s = sqrt_mod(disc, p)
        return FieldElem((t + s) * half, p), cls
    r = sqrt_mod(disc * pow(nonresidue(p), -1, p), p)
    return QuadElem(t * half, r * half, p), cls
