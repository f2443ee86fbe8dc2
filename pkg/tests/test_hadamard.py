import itertools

import numpy as np
import pytest
from conftest import sieve

from approxh.errors import InvalidArgument, NotFound, SizeLimit
from approxh.hadamard import (
    OrderRegistry,
    available_order_near,
    default_registry,
    kronecker,
    paley,
    sylvester,
    verify_hadamard,
)
from approxh.spectral import singular_values

PRIMES = sieve(2000)
WALSH = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]])


def rows_orthogonal(H) -> bool:
    """Pairwise row check in Python integers, independent of verify_hadamard."""
    rows = [[int(x) for x in r] for r in np.asarray(H)]
    n = len(rows)
    if any(abs(x) != 1 for r in rows for x in r):
        return False
    return all(sum(a * b for a, b in zip(rows[i], rows[j])) == (n if i == j else 0) for i in range(n) for j in range(i, n))


def test_sylvester_small():
    assert sylvester(0).entries.tolist() == [[1]]
    assert sylvester(1).entries.tolist() == [[1, 1], [1, -1]]
    assert np.array_equal(sylvester(2).entries, WALSH)


def test_sylvester_cap():
    with pytest.raises(SizeLimit):
        sylvester(5, cap=16)
    with pytest.raises(InvalidArgument):
        sylvester(-1)


@pytest.mark.parametrize("q", [3, 7, 11, 19, 23, 31, 43])
def test_paley_orders(q):
    H = paley(q)
    assert H.order == q + 1 and H.provenance == "paley"
    assert rows_orthogonal(H.entries)


@pytest.mark.parametrize("q", [5, 13, 9, 15, 2])
def test_paley_rejects(q):
    with pytest.raises(InvalidArgument):
        paley(q)


def test_kronecker_identity_and_orders():
    one = sylvester(0)
    h12 = paley(11)
    assert kronecker(one, h12) is h12
    assert kronecker(h12, one) is h12
    h4 = kronecker(sylvester(1), sylvester(1))
    assert rows_orthogonal(h4.entries)
    h24 = kronecker(sylvester(1), h12)
    assert h24.order == 24 and rows_orthogonal(h24.entries)


def test_kronecker_2x2_equivalent_to_sylvester():
    K = kronecker(sylvester(1), sylvester(1)).entries.astype(int)
    S = sylvester(2).entries.astype(int)
    # equal up to a row permutation (here the identity)
    target = {tuple(map(tuple, S))}
    found = False
    for perm in itertools.permutations(range(4)):
        P = K[list(perm)]
        if tuple(map(tuple, P)) in target:
            found = True
            break
    assert found


def test_verify_examples():
    assert verify_hadamard(sylvester(3).entries)
    assert not verify_hadamard(np.ones((2, 2), dtype=int))
    assert verify_hadamard(paley(19).entries)
    assert not verify_hadamard(np.array([[1, 0], [0, 1]]))
    with pytest.raises(InvalidArgument):
        verify_hadamard(np.ones((2, 3)))


def test_entries_read_only():
    H = sylvester(3).entries
    with pytest.raises(ValueError):
        H[0, 0] = -1


def _closure_oracle(cap):
    base = {2**k for k in range(14) if 2**k <= cap} | {q + 1 for q in range(3, cap) if PRIMES[q] and q % 4 == 3}
    orders = set(base)
    changed = True
    while changed:
        changed = False
        for a in list(orders):
            for b in base:
                if a * b <= cap and a * b not in orders:
                    orders.add(a * b)
                    changed = True
    return orders


def test_registry_matches_closure_oracle():
    assert default_registry(2000).orders == _closure_oracle(2000)


def test_registry_every_order_builds_small():
    reg = OrderRegistry(256)
    for m in sorted(reg.orders):
        H = reg.build(m)
        assert H.order == m and verify_hadamard(H.entries)
        s = singular_values(H.entries)
        np.testing.assert_allclose(s, np.sqrt(m), rtol=1e-9)


def test_registry_build_errors():
    reg = OrderRegistry(64)
    with pytest.raises(NotFound):
        reg.build(6)
    with pytest.raises(SizeLimit):
        reg.build(128)


@pytest.mark.parametrize("n, eps, expected", [(4, 0, 4), (25, 0.3, 24), (100, 0.1, 96)])
def test_available_order_near_examples(n, eps, expected):
    assert available_order_near(n, eps) == expected


def test_available_order_near_brute_force():
    orders = sorted(default_registry().orders)
    for n in range(2, 3000, 7):
        hits = [m for m in orders if m % 2 == 0 and 0.9 * n <= m <= 1.1 * n]
        if not hits:
            with pytest.raises(NotFound):
                available_order_near(n, 0.1)
            continue
        m = available_order_near(n, 0.1)
        assert m == min(hits, key=lambda x: (abs(x - n), x))
        if m < 1000:
            assert default_registry().build(m).order == m
