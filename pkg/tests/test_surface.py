import itertools
import json

import pytest
from hypothesis import given, strategies as st

from markoff import surface
from markoff.ff import ConfigError
from markoff.sl2 import TooLarge
from markoff.surface import (
    OrbitRecord,
    decompose_level,
    enumerate_level,
    exceptional_set,
    level,
    move_r,
    move_s,
    move_t,
    orbit_of,
)

import oracles


def test_level_examples():
    assert level((0, 0, 0), 7) == 5  # -2
    assert level((1, 1, 0), 7) == 0
    assert level((3, 3, 3), 7) == 5


def test_move_examples():
    assert move_t((1, 1, 0), 7) == (1, 1, 1)
    assert level((1, 1, 1), 7) == 0
    assert move_r(move_s((2, 0, 3), 7), 7) == (3, 2, 0)
    for t in itertools.product(range(7), repeat=3):
        assert move_t(move_t(t, 7), 7) == t


@given(st.sampled_from(oracles.primes(7, 101)), st.tuples(*(st.integers(0, 10**4),) * 3))
def test_moves_preserve_level(p, t):
    t = tuple(v % p for v in t)
    for m in (move_r, move_s, move_t):
        assert level(m(t, p), p) == level(t, p)
        assert m(m(t, p), p) == t


@pytest.mark.parametrize("k,n", [(-2, 29), (0, 22), (3, 64)])
def test_enumerate_examples(k, n):
    got = enumerate_level(7, k)
    assert len(got) == n
    assert got == oracles.level_set(7, k % 7)


def test_orbit_examples():
    o = orbit_of((0, 0, 0), 7)
    assert (o.size, o.representative) == (1, (0, 0, 0))
    assert orbit_of((1, 1, 0), 7).size == 16
    assert orbit_of((3, 0, 0), 7).size == 6


def test_rst_closure_equals_full_symmetry():
    p = 7
    for k in range(p):
        for o in oracles.orbits_of_level(p, k):
            assert surface.orbit_members(min(o), p) == o


def test_exceptional_examples():
    recs = exceptional_set(7, 0)
    assert [(r.klass, r.size) for r in recs] == [("Dihedral", 6), ("A4", 16)]
    assert sum(r.size for r in recs) == 22
    recs = exceptional_set(11, 1)
    assert [(r.klass, r.size) for r in recs] == [("Dihedral", 6), ("A5_72", 72)]
    # 5 = -2 mod 7: only the origin
    assert [r.klass for r in exceptional_set(7, 5)] == ["Origin"]
    assert exceptional_set(7, 4) == []


def test_decompose_examples():
    r = decompose_level(7, -2)
    assert [(o.klass, o.size) for o in r.orbits] == [("Origin", 1), ("Cage", 28)]
    assert r.strong_approx_ok and r.count_formula_ok
    r = decompose_level(7, 0)
    assert [(o.klass, o.size) for o in r.orbits] == [("Dihedral", 6), ("A4", 16)]
    assert r.cage_orbits == [] and r.strong_approx_ok
    r = decompose_level(7, 3)
    assert [(o.klass, o.size) for o in r.orbits] == [("Cage", 64)]
    r = decompose_level(7, 2)
    assert {o.klass for o in r.orbits} == {"SingularLevel"} and not r.strong_approx_ok


@pytest.mark.parametrize("p", [7, 11, 13, 17])
def test_decompose_matches_oracle(p):
    for k in range(p):
        r = decompose_level(p, k)
        ref = oracles.orbits_of_level(p, k)
        assert r.total == sum(o.size for o in r.orbits) == sum(len(o) for o in ref)
        assert sorted((o.representative, o.size) for o in r.orbits) == sorted((min(o), len(o)) for o in ref)
        assert r.exceptional_total == sum(o.size for o in r.orbits if o.klass != "Cage")
        for o in r.orbits:
            if o.klass in surface.TABLE_SIZES:
                assert o.size == surface.TABLE_SIZES[o.klass]
            members = next(m for m in ref if min(m) == o.representative)
            assert o.two_nonzero == any(sum(1 for v in m if v) >= 2 for m in members)


def test_singular_level_no_mixed_coordinates():
    for p in oracles.primes(7, 31):
        hyp = {t for t in range(p) if oracles.leg(t * t - 4, p) == 1}
        ell = {t for t in range(p) if oracles.leg(t * t - 4, p) == -1}
        for t in enumerate_level(p, 2):
            assert not (hyp & set(t) and ell & set(t))


def _expected_exceptional_total(p, k):
    total = 0
    rows = [((0, 0, 0), 1), ((1, 1, 0), 16)]
    r2 = [r for r in range(p) if r * r % p == 2]
    if r2:
        rows.append(((min(r2), 1, 0), 36))
    r5 = [r for r in range(p) if r * r % p == 5]
    if r5:
        h = pow(2, -1, p)
        phi, psi = (1 + r5[0]) * h % p, (1 - r5[0]) * h % p
        rows += [((phi, psi, 0), 72), ((phi, 1, 0), 40), ((psi, 1, 0), 40)]
    for g, n in rows:
        if oracles.level(g, p) == k:
            total += n
    if (k + 2) % p and oracles.leg(k + 2, p) == 1:
        total += 6
    return total


@pytest.mark.parametrize("p", oracles.primes(7, 100))
def test_exceptional_totals(p):
    for k in range(p):
        got = sum(r.size for r in exceptional_set(p, k))
        assert got == _expected_exceptional_total(p, k)


def test_determinism():
    a = json.dumps(decompose_level(23, 7).to_dict(), sort_keys=True)
    b = json.dumps(decompose_level(23, 7).to_dict(), sort_keys=True)
    assert a == b


def test_budget(monkeypatch):
    monkeypatch.setenv("MARKOFF_MAX_P", "50")
    with pytest.raises(TooLarge):
        enumerate_level(53, 1)
    with pytest.raises(ConfigError):
        decompose_level(9, 1)


def test_orbit_limit():
    with pytest.raises(TooLarge):
        orbit_of((1, 2, 3), 31, limit=10)


def test_sort_key_orders_classes():
    a = OrbitRecord((0, 1, 2), 6, "Dihedral")
    b = OrbitRecord((0, 0, 1), 9, "Cage")
    assert sorted([b, a], key=OrbitRecord.sort_key) == [a, b]
