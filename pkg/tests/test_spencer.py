import pytest
from hypothesis import given, settings, strategies as st

from jetspencer.catalog import make_system
from jetspencer.jets import JetSystem, direct_sum
from jetspencer.spencer import (NotStabilized, cartan_test, compatibility_sequence, delta_complex,
                                involutivity_degree, jet_spencer_exactness, koszul_dual_dims,
                                spencer_table)
from jetspencer.symbols import WindowTooSmall, symbol_family

import frozen
from systems import random_system

CR, LAP, C1 = make_system("cauchy_riemann"), make_system("laplace"), make_system("closed_one_form:2")


def full(n, m):
    return JetSystem("full", tuple(f"x{i}" for i in range(n)), tuple(f"u{a}" for a in range(m)), (), 1)


def test_delta_examples():
    lvl = delta_complex(symbol_family(full(2, 1), 3), 2)
    assert lvl.terms == (3, 4, 1) and lvl.ranks == (3, 1)
    assert lvl.cohomology() == (0, 0, 0)
    lap = delta_complex(symbol_family(LAP, 3), 2)
    assert lap.terms == (2, 4, 1) and lap.ranks == (2, 1)
    assert lap.cohomology() == (0, 1, 0)
    cr = delta_complex(symbol_family(CR, 2), 1)
    assert cr.terms == (2, 4, 0) and cr.cohomology()[1] == 2


def test_delta_window():
    with pytest.raises(WindowTooSmall):
        delta_complex(symbol_family(LAP, 3), 4)


@pytest.mark.parametrize("name", sorted(frozen.CATALOG))
def test_table_matches_oracle(name):
    dims, rows = frozen.CATALOG[name]
    t = spencer_table(symbol_family(make_system(name), len(dims) - 1), check=True)
    assert t.as_lists() == rows


@pytest.mark.parametrize("seed", sorted(frozen.RANDOM))
def test_random_table_matches_oracle(seed):
    dims, rows = frozen.RANDOM[seed]
    t = spencer_table(symbol_family(random_system(seed, nmax=2, mmax=2), len(dims) - 1), check=True)
    assert t.as_lists() == rows


def test_table_nonzero_entries():
    assert spencer_table(symbol_family(LAP, 5)).nonzero() == {(0, 0): 1, (2, 1): 1}
    assert spencer_table(symbol_family(CR, 5)).nonzero() == {(0, 0): 2, (1, 1): 2}
    assert spencer_table(symbol_family(full(2, 2), 5)).nonzero() == {(0, 0): 2}


def test_strict_window():
    with pytest.raises(WindowTooSmall):
        spencer_table(symbol_family(LAP, 3), strict=True)


def test_involutivity_degree_examples():
    assert involutivity_degree(symbol_family(LAP, 6)) == 3
    assert involutivity_degree(symbol_family(CR, 5)) == 2
    assert involutivity_degree(symbol_family(full(2, 1), 4)) == 1
    with pytest.raises(NotStabilized):
        involutivity_degree(symbol_family(LAP, 4))


def test_cartan_examples():
    r = cartan_test(symbol_family(LAP, 4), 2, seed=0)
    assert r.involutive and r.characters == (2, 0) and r.dim_next == 2
    assert cartan_test(symbol_family(CR, 3), 1).characters == (2, 0)
    r = cartan_test(symbol_family(C1, 3), 1)
    assert r.involutive and r.characters == (2, 1) and r.dim_next == 4
    assert not cartan_test(symbol_family(LAP, 4), 1).involutive


@pytest.mark.parametrize("key", sorted(frozen.CHARACTERS))
def test_characters_match_oracle(key):
    name, q = key
    assert cartan_test(symbol_family(make_system(name), q + 2), q).characters == frozen.CHARACTERS[key]


def test_cartan_propagates_to_higher_degree():
    for s in (CR, LAP, C1, make_system("heat"), make_system("closed_one_form:3")):
        f = symbol_family(s, s.order + 5)
        passed = [q for q in range(s.order, f.qmax) if cartan_test(f, q).involutive]
        assert passed and passed == list(range(passed[0], f.qmax))


def test_koszul_examples():
    assert koszul_dual_dims(symbol_family(LAP, 4), 2, 1) == 1
    assert koszul_dual_dims(symbol_family(CR, 4), 1, 1) == 2
    f = symbol_family(full(2, 2), 4)
    assert all(koszul_dual_dims(f, q, p) == 0 for q in range(1, 5) for p in range(3))


def test_jet_spencer_examples():
    r = jet_spencer_exactness((2, 1), 2)
    assert r["interior_exact"] and r["kernel_at_start"] == 1 and r["squares_to_zero"]
    assert jet_spencer_exactness((1, 1), 3)["interior_exact"]
    r = jet_spencer_exactness(full(3, 2), 2)
    assert r["interior_exact"] and r["cohomology"][0] == 2
    with pytest.raises(ValueError):
        jet_spencer_exactness((2, 1), 0)


def test_compatibility_gradient():
    steps, inv = compatibility_sequence(make_system("gradient:2"), 3, 6)
    assert inv
    assert [s.rank for s in steps] == [1, 0]
    (curl,) = steps[0].generators
    # xi_y * e_x - xi_x * e_y (up to scale)
    assert {len(p) for p in curl} == {1}
    assert all(steps[0].exact.values())


def test_compatibility_gradient_3d():
    steps, _ = compatibility_sequence(make_system("gradient:3"), 4, 6)
    assert [s.rank for s in steps] == [3, 1, 0]
    assert all(all(s.exact.values()) for s in steps)


def test_compatibility_full_is_empty():
    steps, _ = compatibility_sequence(full(2, 1), 2, 4)
    assert len(steps) == 1 and steps[0].rank == 0


def test_direct_sum_degree_is_max():
    for a, b in [(CR, LAP), (C1, LAP), (CR, C1)]:
        s = direct_sum(a, b)
        w = 8
        assert involutivity_degree(symbol_family(s, w)) == max(
            involutivity_degree(symbol_family(a, w)), involutivity_degree(symbol_family(b, w)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_euler_characteristic(seed):
    s = random_system(seed)
    f = symbol_family(s, s.order + 3)
    for q in range(f.qmax + 1):
        lvl = delta_complex(f, q)
        h = lvl.cohomology()
        assert all(x >= 0 for x in h)
        assert sum((-1) ** p * d for p, d in enumerate(lvl.terms)) == sum((-1) ** p * x for p, x in enumerate(h))
        if q >= 1:
            assert h[0] == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_koszul_duality_random(seed):
    s = random_system(seed, nmax=2)
    f = symbol_family(s, s.order + 3)
    t = spencer_table(f)
    for q in range(f.qmax + 1):
        for p in range(f.n + 1):
            assert koszul_dual_dims(f, q, p) == t.entry(q, p)
