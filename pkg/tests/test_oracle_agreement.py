"""Live comparison with the sympy reference on random small systems."""

from hypothesis import given, settings, strategies as st

from jetspencer.spencer import spencer_table
from jetspencer.symbols import symbol_family

import oracle
from systems import random_system, to_oracle


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6))
def test_symbol_and_table_agree_with_oracle(seed):
    s = random_system(seed, nmax=2, mmax=2)
    n, m, eqs = to_oracle(s)
    qmax = s.order + 2
    f = symbol_family(s, qmax)
    assert f.dims == oracle.symbol_dims(n, m, eqs, qmax)
    assert spencer_table(f).as_lists() == oracle.spencer_rows(n, m, eqs, qmax)


def test_frozen_values_reproduce():
    import frozen
    for seed in (3, 29):
        dims, rows = frozen.RANDOM[seed]
        n, m, eqs = to_oracle(random_system(seed, nmax=2, mmax=2))
        assert oracle.symbol_dims(n, m, eqs, len(dims) - 1) == dims
        assert oracle.spencer_rows(n, m, eqs, len(rows) - 1) == rows
