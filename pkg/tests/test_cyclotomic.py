from fractions import Fraction

import pytest

from ltperiods.cyclotomic import (
    Cyc,
    CyclotomicField,
    CyclotomicRing,
    cyclotomic_polynomial,
    cyclotomic_ring,
    euler_phi,
    get_field,
)
from ltperiods.domains import RationalDomain
from ltperiods.errors import LevelError


def test_cyclotomic_polynomial_frozen():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(9) == (1, 0, 0, 1, 0, 0, 1)  # Z^6+Z^3+1
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("M", [6, 8, 10, 12, 20, 30])
def test_cyclotomic_product_identity(M):
    # independent identity: prod_{d | M} Phi_d = X^M - 1
    prod = [1]
    for d in range(1, M + 1):
        if M % d == 0:
            phi = cyclotomic_polynomial(d)
            out = [0] * (len(prod) + len(phi) - 1)
            for i, a in enumerate(prod):
                for j, b in enumerate(phi):
                    out[i + j] += a * b
            prod = out
    want = [-1] + [0] * (M - 1) + [1]
    assert prod == want


def test_cyclotomic_ring_invariants():
    with pytest.raises(LevelError):
        cyclotomic_ring(3, 0)
    r = cyclotomic_ring(2, 1)
    assert r.eq(r.zeta, r.from_int(-1))
    r3 = cyclotomic_ring(3, 1)
    assert r3.is_zero(r3.sub(r3.pow(r3.zeta, 3), r3.one))
    r9 = cyclotomic_ring(3, 2)
    assert r9.is_zero(r9.sub(r9.pow(r9.zeta, 9), r9.one))
    assert not r9.is_zero(r9.sub(r9.pow(r9.zeta, 3), r9.one))


@pytest.mark.parametrize("p,n", [(2, 2), (3, 1), (3, 2), (5, 1), (7, 1)])
def test_primitive_root_relation(p, n):
    # sum_{j=0}^{p-1} zeta^(j p^(n-1)) = 0
    r = cyclotomic_ring(p, n)
    acc = r.zero
    for j in range(p):
        acc = r.add(acc, r.root(j * p ** (n - 1)))
    assert r.is_zero(acc)


def test_field_inverse():
    f = get_field(5)
    z = f.root(1)
    zi = f.inv(z)
    assert f.eq(f.mul(z, zi), f.one)
    a = f.add(z, f.from_int(2))
    assert f.eq(f.mul(a, f.inv(a)), f.one)


def test_lift_compatibility():
    f3 = get_field(3)
    f9 = get_field(9)
    z3_in_9 = f9.lift_from(f3, f3.root(1))
    assert f9.eq(z3_in_9, f9.root(3))


def test_cyc_wrapper_arithmetic():
    i = Cyc.root_of_unity(4)
    assert (i * i).as_fraction() == Fraction(-1)
    z3 = Cyc.root_of_unity(3)
    mixed = i * z3
    assert mixed == Cyc.root_of_unity(12, 3 + 4)  # zeta_12^3 * zeta_12^4
    assert (mixed / mixed).as_fraction() == 1
    assert (i + 1 - 1 - i).is_zero()
    assert (i ** (-1)) == -i


def test_cyc_rational_detection():
    t = Cyc.root_of_unity(3)
    s = sum([t**j for j in range(3)], Cyc.from_fraction(0))
    assert s.as_fraction() == 0
    assert Cyc.from_fraction(Fraction(7, 3)).is_rational


def test_try_base_on_quotient():
    f = get_field(5)
    assert f.try_rational(f.from_fraction(Fraction(2, 7))) == Fraction(2, 7)
    assert f.try_rational(f.root(1)) is None
