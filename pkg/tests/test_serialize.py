from fractions import Fraction

import pytest

from ltperiods.characters import UnitCharacter
from ltperiods.cyclotomic import Cyc
from ltperiods.domains import PadicDomain, RationalDomain
from ltperiods.errors import SchemaError
from ltperiods.lubin_tate import multiplicative_group
from ltperiods.local_factors import MultChar
from ltperiods.serialize import (
    differential_from_json,
    differential_to_json,
    domain_from_json,
    dumps,
    group_from_json,
    group_to_json,
    kirillov_from_json,
    kirillov_to_json,
    mult_char_from_json,
    mult_char_to_json,
    series_from_json,
    series_to_json,
    unit_character_from_json,
    unit_character_to_json,
    value_from_json,
    value_to_json,
)
from ltperiods.series import TruncatedSeries
from ltperiods.wald_local import KirillovVector, Tail


def test_series_roundtrip_rational():
    Q = RationalDomain()
    s = TruncatedSeries(Q, [Fraction(1, 2), Fraction(-3), Fraction(0), Fraction(7, 5)], 5)
    j = series_to_json(s)
    assert j["domain"] == {"mode": "rational"}
    assert j["coeffs"][0] == "1/2"
    back = series_from_json(j)
    assert back.eq(s) and back.trunc == 5


def test_series_roundtrip_padic():
    d = PadicDomain(3, 6)
    s = TruncatedSeries(d, [d.from_int(7), (5, 2)], 3)
    j = series_to_json(s)
    assert j["coeffs"][1] == "5@2"
    back = series_from_json(j)
    assert back.ring == d
    assert d.eq(back.coeffs[1], (5, 2))


def test_value_roundtrip_cyclotomic():
    v = Cyc.root_of_unity(5, 2) + Cyc.from_fraction(Fraction(1, 3))
    j = value_to_json(v)
    assert j["cyc"] == 5
    assert value_from_json(j) == v
    assert value_from_json("7/3").as_fraction() == Fraction(7, 3)


def test_group_roundtrip():
    g = multiplicative_group(3, 8)
    j = group_to_json(g)
    back = group_from_json(j)
    assert back.model == g.model and back.F.eq(g.F)


def test_unit_character_roundtrip():
    for chi in UnitCharacter.all_characters(5, 2):
        j = unit_character_to_json(chi)
        back = unit_character_from_json(j)
        assert back == chi


def test_mult_char_roundtrip():
    chi = MultChar.from_unit_character(UnitCharacter.quadratic(7), Fraction(2, 7))
    j = mult_char_to_json(chi)
    back = mult_char_from_json(j)
    assert back == chi


def test_kirillov_roundtrip():
    mu = MultChar.unramified(3, Fraction(1, 2))
    f = KirillovVector(3, [(1, 1, 0, Fraction(2)), (2, 1, 1, Fraction(1, 3))], Tail("log", mu, 2))
    j = kirillov_to_json(f)
    back = kirillov_from_json(j)
    assert back.l == 3 and len(back.masses) == 2
    assert back.tail.kind == "log" and back.tail.coeff.as_fraction() == 2
    assert back.unit_integral() == f.unit_integral()


def test_differential_roundtrip_and_malformed():
    from ltperiods.coleman import TorusDifferential

    omega = TorusDifferential.from_laurent_coefficients({2: 3, -1: 1, 0: Fraction(1, 2)})
    j = differential_to_json(omega)
    back = differential_from_json(j)
    assert back == omega
    with pytest.raises(SchemaError):
        series_from_json({"trunc": 2})
    with pytest.raises(SchemaError):
        domain_from_json({"mode": "float"})
    with pytest.raises(SchemaError):
        unit_character_from_json({"p": 3, "n": 1, "values": {"2": "zeta_5^1"}})


def test_dumps_is_deterministic():
    a = dumps({"b": 1, "a": [2, 3]})
    b = dumps({"a": [2, 3], "b": 1})
    assert a == b
