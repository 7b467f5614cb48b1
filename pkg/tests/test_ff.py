import pytest
from hypothesis import given, strategies as st

from markoff.ff import (
    ConfigError,
    FieldElem,
    ParabolicInput,
    QuadElem,
    TraceClass,
    check_modulus,
    classify_trace,
    legendre,
    legendre_table,
    nonresidue,
    sqrt_mod,
    sqrt_table,
    trace_split,
)

import oracles

PRIMES = oracles.primes(7, 200)
prime = st.sampled_from(PRIMES)


def test_legendre_examples():
    assert legendre(2, 7) == 1
    assert legendre(0, 7) == 0
    assert legendre(5, 7) == -1


def test_sqrt_examples():
    assert sqrt_mod(2, 7) == 3
    assert sqrt_mod(0, 11) == 0
    assert sqrt_mod(5, 7) is None


def test_classify_examples():
    assert classify_trace(2, 11) is TraceClass.PARABOLIC
    assert classify_trace(3, 11) is TraceClass.HYPERBOLIC
    assert classify_trace(3, 7) is TraceClass.ELLIPTIC


def test_trace_split_examples():
    u, cls = trace_split(3, 11)
    assert cls is TraceClass.HYPERBOLIC and u == 9
    assert u + u.inverse() == 3
    u, cls = trace_split(0, 7)
    assert cls is TraceClass.ELLIPTIC
    assert isinstance(u, QuadElem) and not u.in_base()
    assert u * u == -1
    assert u**8 == 1
    with pytest.raises(ParabolicInput):
        trace_split(2, 7)
    with pytest.raises(ParabolicInput):
        trace_split(5, 7)


@pytest.mark.parametrize("p", [0, 2, 3, 4, 5, 9, 15, 49])
def test_bad_modulus(p):
    with pytest.raises(ConfigError, match="p must be prime > 5"):
        check_modulus(p)
    with pytest.raises(ConfigError):
        FieldElem(1, p)


@pytest.mark.parametrize("p", PRIMES[:20])
def test_tables_match_oracle(p):
    sq = oracles.squares(p)
    lt = legendre_table(p)
    st_ = sqrt_table(p)
    for a in range(p):
        assert legendre(a, p) == oracles.leg(a, p) == lt[a]
        r = sqrt_mod(a, p)
        if a in sq:
            roots = [x for x in range(p) if x * x % p == a]
            assert r == min(roots) == st_[a]
        else:
            assert r is None and st_[a] == -1


@pytest.mark.parametrize("p", PRIMES[:20])
def test_trace_class_partition(p):
    cls = [classify_trace(t, p) for t in range(p)]
    assert cls.count(TraceClass.HYPERBOLIC) == (p - 3) // 2
    assert cls.count(TraceClass.ELLIPTIC) == (p - 1) // 2
    assert cls.count(TraceClass.PARABOLIC) == 2


def test_tonelli_branch():
    # p = 1 mod 8 forces the general algorithm
    for p in (17, 41, 73, 97, 113, 193):
        for a in range(1, p):
            r = sqrt_mod(a, p)
            assert (r is None) == (oracles.leg(a, p) == -1)
            if r is not None:
                assert r * r % p == a and r <= p - r


@given(prime, st.integers(), st.integers())
def test_legendre_multiplicative(p, a, b):
    if a % p and b % p:
        assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)


@given(prime, st.integers(0, 10**6))
def test_trace_split_roundtrip(p, t):
    t %= p
    if t in (2, p - 2):
        return
    u, cls = trace_split(t, p)
    assert u * u.inverse() == 1
    assert u + u.inverse() == t
    assert u != 1 and u != -1
    if cls is TraceClass.HYPERBOLIC:
        assert isinstance(u, FieldElem)
    else:
        assert u ** (p + 1) == 1


@given(prime, st.integers(), st.integers())
def test_frobenius(p, a0, a1):
    w = QuadElem(a0, a1, p)
    assert w**p == w.frobenius()
    assert w ** (p * p) == w
    assert (w**p == w) == w.in_base()
    assert w.norm() == (w * w.conjugate()).to_base()


@given(prime, st.integers(), st.integers())
def test_field_ops(p, a, b):
    x, y = FieldElem(a, p), FieldElem(b, p)
    assert 0 <= x.value < p
    assert (x + y).value == (a + b) % p
    assert (x * y) == a * b
    assert x - y == -(y - x)
    if y.value:
        assert (x / y) * y == x
    assert x.lift() == x and hash(x.lift()) == hash(x)


def test_nonresidue_is_smallest():
    for p in PRIMES:
        nu = nonresidue(p)
        assert oracles.leg(nu, p) == -1
        assert all(oracles.leg(n, p) == 1 for n in range(1, nu))


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        FieldElem(1, 7) + FieldElem(1, 11)
