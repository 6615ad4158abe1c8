import random

from fractions import Fraction

import pytest

from ltperiods.coleman import (
    ColemanFunction,
    FrobeniusSpec,
    TorusDifferential,
    apply_p_of_frobenius,
    coleman_primitive,
    frobenius_pullback,
    is_frobenius_proper,
)
from ltperiods.errors import ConstructionError
from ltperiods.series import LaurentPoly


def test_frobenius_spec_rejects_roots_of_unity():
    with pytest.raises(ConstructionError):
        FrobeniusSpec(3, (-1, 1))  # P = X - 1
    with pytest.raises(ConstructionError):
        FrobeniusSpec(3, (1, 1))  # P = X + 1 vanishes at -1
    with pytest.raises(ConstructionError):
        FrobeniusSpec(2, (1, 1, 1))  # Phi_3
    FrobeniusSpec.linear(3)  # X - 3 is fine
    FrobeniusSpec(2, (-4, 0, 1))  # (X-2)(X+2)


def test_pullback_frozen():
    log = ColemanFunction.log_symbol()
    assert frobenius_pullback(log, 3) == ColemanFunction.log_symbol(3)
    t2 = ColemanFunction(LaurentPoly({2: 1}))
    assert frobenius_pullback(t2, 2) == ColemanFunction(LaurentPoly({4: 1}))
    dlog = TorusDifferential.dlog()
    assert frobenius_pullback(dlog, 5) == TorusDifferential.dlog(5)


def test_is_frobenius_proper_frozen():
    spec = FrobeniusSpec.linear(3)
    ok, witness = is_frobenius_proper(TorusDifferential.dlog(), spec)
    assert ok and witness.is_zero()  # P(phi*) dT/T = 0 for P = X - q
    # omega = dT: witness primitive of d(T^q) - q dT is T^q - qT
    spec2 = FrobeniusSpec.linear(2)
    omega = TorusDifferential.from_laurent_coefficients({0: 1})
    ok2, witness2 = is_frobenius_proper(omega, spec2)
    assert ok2
    assert witness2 == LaurentPoly({2: 1, 1: -2})
    # P = X - 1 is rejected at spec construction (root of unity)
    with pytest.raises(ConstructionError):
        FrobeniusSpec(3, (-1, 1))


def test_coleman_primitive_frozen():
    spec = FrobeniusSpec.linear(3)
    f = coleman_primitive(TorusDifferential.dlog(5), spec)
    assert f == ColemanFunction.log_symbol(5)
    f2 = coleman_primitive(TorusDifferential.from_laurent_coefficients({0: 1}), spec)
    assert f2 == ColemanFunction(LaurentPoly({1: 1}))
    # (3T^2 + T^(-1)) dT -> T^3 + LOG
    f3 = coleman_primitive(
        TorusDifferential.from_laurent_coefficients({2: 3, -1: 1}), spec
    )
    assert f3 == ColemanFunction(LaurentPoly({3: 1}), 1)


def test_malformed_input_extra_dlog_term():
    # the exact part is a function; its differential can never carry T^(-1) dT,
    # so feeding a T^(-1) coefficient beyond the declared residue must fail
    with pytest.raises(AssertionError):
        LaurentPoly({-1: 1}).dlog_free_primitive()


def random_differential(rng):
    coeffs = {}
    for _ in range(rng.randrange(1, 6)):
        e = rng.randrange(-6, 7)
        coeffs[e] = Fraction(rng.randrange(-9, 10))
    return TorusDifferential.from_laurent_coefficients(coeffs)


def test_random_primitive_suite():
    rng = random.Random(12)
    spec = FrobeniusSpec.linear(5)
    for _ in range(500):
        omega = random_differential(rng)
        f = coleman_primitive(omega, spec)
        assert f.differential() == omega
        image = apply_p_of_frobenius(f, spec)
        assert not image.has_log()


def test_additivity():
    rng = random.Random(13)
    spec = FrobeniusSpec.linear(3)
    for _ in range(50):
        a = random_differential(rng)
        b = random_differential(rng)
        assert coleman_primitive(a + b, spec) == coleman_primitive(a, spec) + coleman_primitive(b, spec)


def test_compat_with_stable_primitive():
    # disc-level cross-check: for stable phi on the multiplicative disc,
    # translating to the T = 1+S coordinate, d(stable_primitive) = phi dT/T
    from math import comb

    from ltperiods.lubin_tate import multiplicative_group
    from ltperiods.mellin import DiscFunction, stabilize, stable_primitive

    rng = random.Random(14)
    p = 3
    g = multiplicative_group(p, 12)
    for _ in range(10):
        coeffs = [Fraction(rng.randrange(-9, 10)) for _ in range(13)]
        phi = stabilize(DiscFunction.from_coeffs(g, coeffs))
        prim = stable_primitive(phi)
        # shift S -> T - 1 on the polynomial coefficients
        def to_T(series):
            D = series.trunc
            out = {}
            for k, c in enumerate(series.coeffs):
                if c:
                    for j in range(k + 1):
                        out[j] = out.get(j, Fraction(0)) + c * comb(k, j) * (-1) ** (k - j)
            return LaurentPoly(out)

        phi_T = to_T(phi.series)
        prim_T = to_T(prim.series)
        # omega = phi(T-1) dT/T as Laurent coefficients
        omega = TorusDifferential.from_laurent_coefficients(
            (phi_T * LaurentPoly({-1: 1})).coeffs
        )
        spec = FrobeniusSpec.linear(p)
        cf = coleman_primitive(omega, spec)
        # stable phi has zero residue in the T-coordinate: no LOG appears
        assert not cf.has_log()
        want = ColemanFunction(prim_T)
        # both primitives agree up to the additive constant (ours is T^0-normalized)
        diff = cf - want
        assert diff.log_coeff == 0
        nonconst = {e: v for e, v in diff.laurent.coeffs.items() if e != 0}
        assert not nonconst
