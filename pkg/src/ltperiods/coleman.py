"""Coleman primitives of Frobenius-proper 1-forms on the rigid torus.

A torus differential is c dT/T + dg with g a Laurent polynomial; the residue
c is intrinsic.  LOG is a formal symbol with d(LOG) = dT/T and
phi* LOG = q LOG; no convergent expansion is ever used, so every identity is
exact.  A differential is Frobenius proper for P when P(phi*) omega is exact,
i.e. when the dT/T part of P(phi*) omega vanishes, which for omega of
residue c means c P(q) = 0.  The primitive of c dT/T + dg is c LOG + g,
unique up to the additive constant fixed to 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cyclotomic import cyclotomic_polynomial, euler_phi
from .errors import ConstructionError, KernelError
from .series import LaurentPoly


@dataclass(frozen=True)
class FrobeniusSpec:
    """Frobenius degree q and a polynomial P with no root of unity among its roots."""

    q: int
    poly: tuple  # ascending coefficients of P

    def __post_init__(self):
        if self.q < 2:
            raise ConstructionError("Frobenius degree must be at least 2")
        coeffs = [Fraction(c) for c in self.poly]
        if len(coeffs) < 2 or coeffs[-1] == 0:
            raise ConstructionError("P must have positive degree with nonzero lead")
        deg = len(coeffs) - 1
        # a rational-coefficient P vanishing at a root of unity is divisible by
        # some Phi_m with phi(m) <= deg; phi(m) >= sqrt(m/2) bounds the search
        for m in range(1, 2 * deg * deg + 2):
            if euler_phi(m) <= deg and _divides(cyclotomic_polynomial(m), coeffs):
                raise ConstructionError(
                    f"P has the {m}-th roots of unity among its roots"
                )

    @classmethod
    def linear(cls, q):
        """P(X) = X - q, the standard choice for the q-power Frobenius."""
        return cls(q, (-q, 1))

    def value_at(self, x):
        acc = Fraction(0)
        for c in reversed(self.poly):
            acc = acc * x + Fraction(c)
        return acc


def _divides(div, poly):
    rem = [Fraction(c) for c in poly]
    dd = len(div) - 1
    lead = Fraction(div[-1])
    while len(rem) - 1 >= dd:
        c = rem[-1] / lead
        for j in range(dd + 1):
            rem[len(rem) - 1 - dd + j] -= c * Fraction(div[j])
        rem.pop()
        while rem and rem[-1] == 0 and len(rem) - 1 >= dd:
            rem.pop()
    return all(c == 0 for c in rem)


class TorusDifferential:
    """c dT/T + dg with g a Laurent polynomial; the decomposition is unique."""

    __slots__ = ("residue", "exact")

    def __init__(self, residue=0, exact=None):
        self.residue = Fraction(residue)
        self.exact = exact if exact is not None else LaurentPoly()

    @classmethod
    def from_laurent_coefficients(cls, coeffs):
        """omega = (sum a_k T^k) dT: a_{-1} is the residue, the rest integrates."""
        c = LaurentPoly(coeffs)
        residue = c.get(-1)
        rest = LaurentPoly({e: v for e, v in c.coeffs.items() if e != -1})
        return cls(residue, rest.dlog_free_primitive())

    @classmethod
    def dlog(cls, scale=1):
        return cls(scale, LaurentPoly())

    def dT_coefficients(self):
        """The differential written as (sum a_k T^k) dT."""
        out = dict(self.exact.derivative().coeffs)
        if self.residue:
            out[-1] = out.get(-1, Fraction(0)) + self.residue
        return LaurentPoly(out)

    def __add__(self, other):
        return TorusDifferential(self.residue + other.residue, self.exact + other.exact)

    def __eq__(self, other):
        if not isinstance(other, TorusDifferential):
            return NotImplemented
        return self.residue == other.residue and self.exact == other.exact

    def scale(self, s):
        return TorusDifferential(self.residue * Fraction(s), self.exact * Fraction(s))

    def is_zero(self):
        return self.residue == 0 and self.exact.is_zero()

    def __repr__(self):
        return f"TorusDifferential({self.residue} dT/T + d[{self.exact!r}])"


class ColemanFunction:
    """Laurent part plus a scalar multiple of the LOG symbol."""

    __slots__ = ("laurent", "log_coeff")

    def __init__(self, laurent=None, log_coeff=0):
        self.laurent = laurent if laurent is not None else LaurentPoly()
        self.log_coeff = Fraction(log_coeff)

    @classmethod
    def log_symbol(cls, scale=1):
        return cls(LaurentPoly(), scale)

    def differential(self):
        """d of this function as a TorusDifferential: d(LOG) = dT/T."""
        return TorusDifferential(self.log_coeff, self.laurent)

    def __add__(self, other):
        return ColemanFunction(self.laurent + other.laurent, self.log_coeff + other.log_coeff)

    def __sub__(self, other):
        return ColemanFunction(self.laurent - other.laurent, self.log_coeff - other.log_coeff)

    def scale(self, s):
        return ColemanFunction(self.laurent * Fraction(s), self.log_coeff * Fraction(s))

    def has_log(self):
        return self.log_coeff != 0

    def __eq__(self, other):
        if not isinstance(other, ColemanFunction):
            return NotImplemented
        return self.laurent == other.laurent and self.log_coeff == other.log_coeff

    def __repr__(self):
        return f"ColemanFunction({self.laurent!r} + {self.log_coeff}*LOG)"


def frobenius_pullback(obj, q):
    """phi*: T -> T^q on Laurent parts, LOG -> q LOG, differentials functorially."""
    if isinstance(obj, ColemanFunction):
        return ColemanFunction(obj.laurent.substitute_power(q), q * obj.log_coeff)
    if isinstance(obj, TorusDifferential):
        return TorusDifferential(q * obj.residue, obj.exact.substitute_power(q))
    raise KernelError(f"cannot pull back {type(obj).__name__}")


def apply_p_of_frobenius(obj, spec):
    """P(phi*) applied termwise."""
    out = None
    power = obj
    for c in spec.poly:
        term = power.scale(c) if c else None
        if term is not None:
            out = term if out is None else out + term
        power = frobenius_pullback(power, spec.q)
    return out


def is_frobenius_proper(omega, spec):
    """(proper?, witness): P(phi*) omega exact iff its residue c P(q) vanishes."""
    image = apply_p_of_frobenius(omega, spec)
    if image.residue != 0:
        return False, None
    return True, image.exact


def coleman_primitive(omega, spec):
    """F = c LOG + g with dF = omega and P(phi*) F rigid analytic; constant 0."""
    ok, _witness = is_frobenius_proper(omega, spec)
    if not ok:
        raise ConstructionError("differential is not Frobenius proper for this P")
    out = ColemanFunction(omega.exact, omega.residue)
    if not out.differential() == omega:
        raise KernelError("primitive failed d F = omega")
    image = apply_p_of_frobenius(out, spec)
    if image.has_log():
        raise KernelError("P(phi*) of the primitive still carries LOG")
    return out
