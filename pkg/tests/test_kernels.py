import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from markoff import kernels
from markoff._accel import USE_NUMBA
from markoff.ff import sqrt_table

import oracles


def _py(fn):
    return getattr(fn, "py_func", fn)


@pytest.mark.parametrize("p", [7, 11, 13, 29, 31])
def test_level_codes_paths_agree(p):
    sq = sqrt_table(p)
    for k in range(p):
        a = _py(kernels._level_codes_loop)(p, k, sq)
        b = kernels._level_codes_numpy(p, k, sq)
        c = kernels.level_codes(p, k)
        assert np.array_equal(a, b) and np.array_equal(b, c)


@pytest.mark.parametrize("p", [7, 11, 13])
def test_level_codes_match_dense_scan(p):
    for k in range(p):
        x, y, z = kernels.decode(kernels.level_codes(p, k), p)
        assert set(zip(x.tolist(), y.tolist(), z.tolist())) == oracles.level_set(p, k)


def test_encode_decode_roundtrip():
    p = 13
    codes = np.arange(p**3)
    assert np.array_equal(kernels.encode(*kernels.decode(codes, p), p), codes)


@given(st.integers(1, 60), st.lists(st.tuples(st.integers(0, 59), st.integers(0, 59)), max_size=80))
def test_components_paths_agree(n, edges):
    edges = [(u % n, v % n) for u, v in edges]
    u = np.array([e[0] for e in edges], dtype=np.int64)
    v = np.array([e[1] for e in edges], dtype=np.int64)
    a = _py(kernels._components_uf)(n, u, v)
    b = kernels._components_numpy(n, u, v)
    c = kernels.connected_components(n, u, v)
    assert np.array_equal(a, b) and np.array_equal(b, c)
    # labels are the smallest member of each component
    for i in range(n):
        assert a[i] <= i and a[a[i]] == a[i]


@pytest.mark.parametrize("p,k", [(7, 0), (7, 3), (11, 1), (13, 5)])
def test_orbit_labels_match_oracle(p, k):
    codes = kernels.level_codes(p, k)
    sizes = sorted(kernels.component_sizes(kernels.orbit_labels(codes, p)).values())
    assert sizes == sorted(len(o) for o in oracles.orbits_of_level(p, k))


def test_sl2_table():
    T = kernels.sl2_table(7)
    assert T.n == 336
    ref = oracles.sl2(7)
    assert sorted(map(tuple, T.elems.tolist())) == sorted(ref)
    rng = np.random.default_rng(1)
    for i, j in rng.integers(0, T.n, size=(200, 2)):
        m = oracles.mul(tuple(T.elems[i]), tuple(T.elems[j]), 7)
        assert tuple(T.elems[T.mult[i, j]]) == m
        assert tuple(T.elems[T.inv[i]]) == oracles.inv(tuple(T.elems[i]), 7)
    orders = T.psl2_orders()
    for i in range(0, T.n, 7):
        assert orders[i] == oracles.psl2_order(tuple(T.elems[i]), 7)


def test_commutator_trace_table():
    p = 7
    T = kernels.sl2_table(p)
    ct = T.commutator_trace()
    rng = np.random.default_rng(2)
    for i, j in rng.integers(0, T.n, size=(300, 2)):
        A, B = tuple(T.elems[i]), tuple(T.elems[j])
        c = oracles.mul(oracles.mul(A, B, p), oracles.mul(oracles.inv(A, p), oracles.inv(B, p), p), p)
        assert ct[i, j] == oracles.tr(c, p)


def test_psl2_closure_early_exit():
    T = kernels.sl2_table(7)
    gens = T.index(np.array([[0, 1, 6, 0], [1, 1, 0, 1]]))
    members, exceeded = kernels.psl2_closure(T, gens, 10**6)
    assert not exceeded and len(members) == 168
    members, exceeded = kernels.psl2_closure(T, gens, 60)
    assert exceeded


def test_numpy_backend_in_subprocess():
    code = (
        "import numpy as np\n"
        "from markoff import kernels, backend_name\n"
        "assert backend_name() == 'numpy', backend_name()\n"
        "print(int(kernels.level_codes(31, 4).sum()), len(kernels.component_sizes("
        "kernels.orbit_labels(kernels.level_codes(31, 4), 31))))\n"
    )
    env = dict(os.environ, MARKOFF_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    codes = kernels.level_codes(31, 4)
    n = len(kernels.component_sizes(kernels.orbit_labels(codes, 31)))
    assert out.stdout.split() == [str(int(codes.sum())), str(n)]


def test_backend_flag_default():
    assert USE_NUMBA == (os.environ.get("MARKOFF_NO_NUMBA", "") in ("", "0", "false", "no"))
