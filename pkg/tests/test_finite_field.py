import itertools

import pytest

from biwalk.errors import NotPrimeError, NotPrimePowerError
from biwalk.finite_field import find_irreducible, gf, gf_order, is_prime, prime_power

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    F = gf_order(q)
    els = range(q)
    for a, b in itertools.product(els, els):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
        assert F.add(a, F.neg(a)) == 0
    for a in els:
        assert F.add(a, 0) == a and F.mul(a, 1) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
    if q <= 9:
        for a, b, c in itertools.product(els, els, els):
            assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
            assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)


@pytest.mark.parametrize("q", ORDERS)
def test_primitive_generates(q):
    F = gf_order(q)
    g = F.primitive
    assert sorted(F.pow(g, i) for i in range(q - 1)) == list(range(1, q))
    assert g in F.primitive_elements()


def test_known_small_fields():
    assert gf(2, 2).modulus == (1, 1, 1)
    assert gf(2, 2).primitive == 2
    assert gf(5).primitive == 2 and gf(5).primitive_elements() == [2, 3]
    assert gf(7).primitive == 3
    assert find_irreducible(3, 2) == (1, 0, 1)


def test_element_arithmetic():
    F = gf(3, 2)
    x, y = F.element(4), F.element(7)
    assert int((x + y) - y) == 4
    assert int((x * y) / y) == 4
    assert int(x**8) == 1
    assert int(-x + x) == 0
    assert int(2 - x) == F.sub(2, 4)
    with pytest.raises(ValueError):
        F.element(9)
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_prime_power_and_errors():
    assert prime_power(64) == (2, 6) and prime_power(49) == (7, 2)
    assert [n for n in range(2, 30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    for n in (6, 10, 12, 1):
        with pytest.raises(NotPrimePowerError):
            prime_power(n)
    with pytest.raises(NotPrimeError):
        gf(4)
    with pytest.raises(NotPrimePowerError):
        gf(2, 7)
