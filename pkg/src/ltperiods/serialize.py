"""Versioned JSON encodings for every kernel object the CLI exchanges.

All schemas carry "schema": "v1".  Rationals serialize as "num/den" strings,
fixed-modulus residues as decimal strings (with "@prec" when an element
carries less than full precision), cyclotomic values as coefficient arrays
against the power basis of zeta.  Encoding is deterministic: sorted keys,
fixed separators, no timestamps.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .characters import FiniteAbelianGroup, UnitCharacter, _unit_group_structure
from .cyclotomic import Cyc, get_field
from .domains import PadicDomain, RationalDomain
from .errors import SchemaError
from .lubin_tate import lt_construct
from .local_factors import MultChar, SataketData
from .mellin import DiscFunction
from .series import LaurentPoly, TruncatedSeries
from .wald_local import KirillovVector, Tail

SCHEMA = "v1"


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def expect(cond, msg):
    if not cond:
        raise SchemaError(msg)


# -- scalar values -------------------------------------------------------------


def fraction_to_str(q):
    return str(Fraction(q))


def fraction_from_str(s):
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as e:
        raise SchemaError(f"bad rational {s!r}: {e}") from e


def value_to_json(v):
    """Fraction or Cyc to JSON: plain string when rational, else a cyc object."""
    if isinstance(v, Cyc):
        q = v.as_fraction()
        if q is not None:
            return fraction_to_str(q)
        return {
            "cyc": v.field.M,
            "coeffs": [fraction_to_str(c) for c in v.coeffs],
        }
    return fraction_to_str(v)


def value_from_json(obj):
    if isinstance(obj, dict):
        expect("cyc" in obj and "coeffs" in obj, "cyclotomic value needs cyc and coeffs")
        M = int(obj["cyc"])
        field = get_field(M)
        coeffs = [fraction_from_str(c) for c in obj["coeffs"]]
        expect(len(coeffs) == field.degree, f"cyclotomic value needs {field.degree} coefficients")
        return Cyc(field, coeffs)
    return Cyc.from_fraction(fraction_from_str(obj))


# -- domains and series --------------------------------------------------------


def domain_to_json(ring):
    if isinstance(ring, RationalDomain):
        return {"mode": "rational"}
    if isinstance(ring, PadicDomain):
        return {"mode": "padic", "p": ring.p, "N": ring.N}
    raise SchemaError(f"domain {ring!r} has no JSON form")


def domain_from_json(obj):
    expect(isinstance(obj, dict) and "mode" in obj, "domain needs a mode")
    if obj["mode"] == "rational":
        return RationalDomain()
    if obj["mode"] == "padic":
        expect("p" in obj and "N" in obj, "padic domain needs p and N")
        return PadicDomain(int(obj["p"]), int(obj["N"]))
    raise SchemaError(f"unknown domain mode {obj['mode']!r}")


def _coeff_to_str(ring, c):
    if isinstance(ring, RationalDomain):
        return fraction_to_str(c)
    if isinstance(ring, PadicDomain):
        v, k = c
        return str(v) if k == ring.N else f"{v}@{k}"
    raise SchemaError("series coefficients must live in a scalar domain")


def _coeff_from_str(ring, s):
    if isinstance(ring, RationalDomain):
        return fraction_from_str(s)
    s = str(s)
    if "@" in s:
        v, k = s.split("@", 1)
        return (int(v) % ring.p ** int(k), int(k))
    return ring.from_int(int(s))


def series_to_json(series):
    return {
        "schema": SCHEMA,
        "domain": domain_to_json(series.ring),
        "trunc": series.trunc,
        "coeffs": [_coeff_to_str(series.ring, c) for c in series.coeffs],
    }


def series_from_json(obj, ring=None):
    expect(isinstance(obj, dict), "series must be an object")
    expect("trunc" in obj and "coeffs" in obj, "series needs trunc and coeffs")
    ring = ring or domain_from_json(obj.get("domain", {"mode": "rational"}))
    D = int(obj["trunc"])
    coeffs = [_coeff_from_str(ring, s) for s in obj["coeffs"]]
    expect(len(coeffs) <= D + 1, "more coefficients than the truncation allows")
    return TruncatedSeries(ring, coeffs, D)


def cyclotomic_element_to_json(field, elem):
    """Coefficient array against the power basis of zeta."""
    return {"cyc": field.M, "coeffs": [fraction_to_str(c) for c in elem]}


# -- formal groups ---------------------------------------------------------------


def group_to_json(group):
    d = group.descriptor()
    d["schema"] = SCHEMA
    d["domain"] = domain_to_json(group.ring)
    return d


def group_from_json(obj, ring=None):
    expect(isinstance(obj, dict), "group descriptor must be an object")
    for key in ("p", "pi", "q_res", "frobenius", "D"):
        expect(key in obj, f"group descriptor needs {key!r}")
    ring = ring or domain_from_json(obj.get("domain", {"mode": "rational"}))
    frob = [fraction_from_str(c) for c in obj["frobenius"]]
    pi = fraction_from_str(obj["pi"])
    if isinstance(ring, PadicDomain):
        frob = [ring.from_fraction(c) for c in frob]
        pi = ring.from_fraction(pi)
    return lt_construct(int(obj["p"]), pi, int(obj["q_res"]), frob, int(obj["D"]), ring=ring)


def bivariate_to_triangular(ms):
    """Triangular rows: rows[i][j] = coefficient of X^i Y^j, i + j <= trunc."""
    D = ms.trunc
    r = ms.ring
    rows = []
    for i in range(D + 1):
        row = []
        for j in range(D + 1 - i):
            row.append(_coeff_to_str(r, ms.coefficient((i, j))))
        rows.append(row)
    return rows


# -- characters ------------------------------------------------------------------


def unit_character_to_json(chi):
    gens, orders = _unit_group_structure(chi.p, chi.n)
    values = {}
    for g, o in zip(gens, orders):
        e = chi.exponent_at(g)
        values[str(g)] = f"zeta_{chi.M}^{e}" if e else "1"
    return {"schema": SCHEMA, "p": chi.p, "n": chi.n, "values": values}


def _parse_root_string(s):
    s = str(s).strip()
    if s.startswith("zeta_"):
        body = s[len("zeta_") :]
        expect("^" in body, f"root of unity {s!r} needs an exponent")
        m, j = body.split("^", 1)
        return int(m), int(j)
    q = fraction_from_str(s)
    if q == 1:
        return 1, 0
    if q == -1:
        return 2, 1
    raise SchemaError(f"character value {s!r} is neither a root of unity nor +-1")


def unit_character_from_json(obj):
    expect(isinstance(obj, dict), "character must be an object")
    for key in ("p", "n"):
        expect(key in obj, f"character needs {key!r}")
    p, n = int(obj["p"]), int(obj["n"])
    if n == 0:
        return UnitCharacter.trivial(p)
    gens, orders = _unit_group_structure(p, n)
    values = obj.get("values", {})
    M = 1
    for o in orders:
        M = M * o // _gcd(M, o)
    gen_exps = []
    for g, o in zip(gens, orders):
        s = values.get(str(g), "1")
        m, j = _parse_root_string(s)
        expect(o % m == 0, f"value at generator {g} has order not dividing {o}")
        # chi(g) = zeta_m^j = zeta_o^(j * o/m); from_generator_exponents wants zeta_o-exponents
        gen_exps.append(j * (o // m) % o)
    return UnitCharacter.from_generator_exponents(p, n, gen_exps)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def mult_char_to_json(chi):
    out = unit_character_to_json(chi.unit)
    out["l"] = chi.l
    out["pi_value"] = value_to_json(chi.pi_value)
    return out


def mult_char_from_json(obj):
    expect(isinstance(obj, dict), "character must be an object")
    expect("l" in obj, "a multiplicative character needs l")
    l = int(obj["l"])
    unit_obj = dict(obj)
    unit_obj.setdefault("p", l)
    unit = unit_character_from_json(unit_obj)
    pi_value = value_from_json(obj.get("pi_value", "1"))
    return MultChar(l, unit, pi_value)


def satake_from_json(obj):
    expect(isinstance(obj, dict) and "kind" in obj, "representation data needs a kind")
    kind = obj["kind"]
    if kind == "principal":
        expect("mu1" in obj and "mu2" in obj, "principal needs mu1 and mu2")
        return SataketData("principal", mu1=mult_char_from_json(obj["mu1"]), mu2=mult_char_from_json(obj["mu2"]))
    if kind == "special":
        expect("mu" in obj, "special needs mu")
        return SataketData("special", mu=mult_char_from_json(obj["mu"]))
    if kind == "supercuspidal":
        eps = obj.get("eps")
        ad = obj.get("ad_l_factor")
        return SataketData(
            "supercuspidal",
            eps_value=None if eps is None else value_from_json(eps),
            ad_l_factor=None if ad is None else value_from_json(ad),
        )
    raise SchemaError(f"unknown representation kind {kind!r}")


# -- Kirillov vectors --------------------------------------------------------------


def kirillov_to_json(f):
    out = {
        "schema": SCHEMA,
        "cosets": [
            {
                "rep": c.rep,
                "depth": c.depth,
                "vpi": c.vpi,
                "value": value_to_json(v),
            }
            for c, v in f.masses
        ],
    }
    if f.tail is not None:
        out["tail"] = {
            "kind": f.tail.kind,
            "mu": mult_char_to_json(f.tail.mu),
            "coeff": value_to_json(f.tail.coeff),
        }
    return out


def kirillov_from_json(obj, l=None):
    expect(isinstance(obj, dict), "Kirillov vector must be an object")
    cosets = []
    for c in obj.get("cosets", []):
        for key in ("rep", "depth", "vpi", "value"):
            expect(key in c, f"coset needs {key!r}")
        cosets.append((int(c["rep"]), int(c["depth"]), int(c["vpi"]), value_from_json(c["value"])))
    tail = None
    if obj.get("tail") is not None:
        t = obj["tail"]
        expect("kind" in t and "mu" in t, "tail needs kind and mu")
        expect(t["kind"] in ("sharp", "log"), f"unknown tail kind {t['kind']!r}")
        mu = mult_char_from_json(t["mu"])
        tail = Tail(t["kind"], mu, value_from_json(t.get("coeff", "1")))
        l = l or mu.l
    expect(l is not None, "Kirillov vector needs a residue prime (tail or explicit l)")
    return KirillovVector(l, cosets, tail)


# -- Laurent / differentials ---------------------------------------------------------


def laurent_to_json(w):
    return {str(e): fraction_to_str(v) for e, v in sorted(w.coeffs.items())}


def laurent_from_json(obj):
    expect(isinstance(obj, dict), "Laurent polynomial must be an exponent map")
    return LaurentPoly({int(e): fraction_from_str(v) for e, v in obj.items()})


def differential_to_json(omega):
    return {
        "schema": SCHEMA,
        "residue": fraction_to_str(omega.residue),
        "exact": laurent_to_json(omega.exact),
    }


def differential_from_json(obj):
    from .coleman import TorusDifferential

    expect(isinstance(obj, dict), "differential must be an object")
    if "dT_coeffs" in obj:
        return TorusDifferential.from_laurent_coefficients(
            {int(e): fraction_from_str(v) for e, v in obj["dT_coeffs"].items()}
        )
    residue = fraction_from_str(obj.get("residue", "0"))
    exact = laurent_from_json(obj.get("exact", {}))
    expect(-1 not in exact.derivative().coeffs or exact.derivative().get(-1) == 0,
           "exact part carries a T^-1 dT term beyond the declared residue")
    return TorusDifferential(residue, exact)


# -- CM coset models ---------------------------------------------------------------


def model_from_json(obj, group):
    from .global_toy import CMCosetModel, CMPoint

    expect(isinstance(obj, dict), "model must be an object")
    expect("C" in obj and "points" in obj, "model needs C and points")
    expect("invariants" in obj["C"], "C needs invariants")
    C = FiniteAbelianGroup([int(d) for d in obj["C"]["invariants"]])
    elements = C.elements()
    action = obj.get("action")
    points = []
    for i, p in enumerate(obj["points"]):
        expect("phi" in p, "every model point needs phi")
        if "dirac" in p["phi"]:
            phi = _dirac_sum_from_json(group, p["phi"])
        else:
            phi = DiscFunction(group, series_from_json(p["phi"], ring=group.ring))
        c_elem = elements[action[i]] if action else elements[i]
        points.append(CMPoint(p.get("id", i), tuple(c_elem), phi, fraction_from_str(p.get("tame", "1"))))
    return CMCosetModel(C, points)


def _dirac_sum_from_json(group, obj):
    phi = None
    for item in obj["dirac"]:
        u = int(item["u"]) if isinstance(item, dict) else int(item)
        coeff = fraction_from_str(item.get("coeff", "1")) if isinstance(item, dict) else Fraction(1)
        term = DiscFunction.dirac(group, u).scale(coeff)
        phi = term if phi is None else phi + term
    expect(phi is not None, "dirac list must be nonempty")
    return phi
