"""Abelian L-factors, Gauss sums, epsilon factors, inverse-L distributions.

Conventions: all s-shifts are folded into characters by |.|^s twisting, with
|pi| = 1/l, so L(mu) = (1 - mu(pi))^(-1) for unramified mu and 1 otherwise.
Epsilon factors are unnormalized Gauss sums at a level-0 additive character,
carrying the uniformizer value: eps(chi) = chi(pi)^n tau(chi_unit, psi) for
conductor n >= 1, which is what makes eps(chi * mu_unram) = mu(pi^n) eps(chi)
hold, and eps = 1 for unramified chi.  The product relation is
tau(chi, psi) tau(chi^(-1), psi) = chi(-1) l^n (same psi on both sides; with
psi inverted on the second factor the chi(-1) drops out).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .characters import UnitCharacter
from .cyclotomic import Cyc
from .errors import (
    ConductorError,
    ConsistencyError,
    MissingDataError,
    PoleError,
)

ONE = Cyc.from_fraction(1)
ZERO = Cyc.from_fraction(0)


def _cyc(x):
    return x if isinstance(x, Cyc) else Cyc.from_fraction(Fraction(x))


class MultChar:
    """Character of a local multiplicative group: unit part + uniformizer value."""

    def __init__(self, l, unit, pi_value=1):
        self.l = l
        self.unit = unit
        self.pi_value = _cyc(pi_value)
        assert unit.p == l

    @classmethod
    def unramified(cls, l, pi_value):
        return cls(l, UnitCharacter.trivial(l), pi_value)

    @classmethod
    def from_unit_character(cls, unit, pi_value=1):
        return cls(unit.p, unit, pi_value)

    @property
    def conductor(self):
        return self.unit.conductor

    def is_unramified(self):
        return self.conductor == 0

    def value(self, u, v=0):
        """chi(u * pi^v) for a unit representative u."""
        out = self.unit.value(u)
        if v:
            out = out * self.pi_value**v
        return out

    def value_at_minus_one(self):
        return self.unit.value_at_minus_one()

    def inverse(self):
        return MultChar(self.l, self.unit.inverse(), ONE / self.pi_value)

    def __mul__(self, other):
        assert self.l == other.l
        return MultChar(self.l, self.unit * other.unit, self.pi_value * other.pi_value)

    def twist_abs(self, s):
        """Multiply by |.|^s: the uniformizer value picks up l^(-s)."""
        return MultChar(self.l, self.unit, self.pi_value * Fraction(1, self.l) ** s)

    def is_trivial(self):
        return self.is_unramified() and self.pi_value == ONE

    def __eq__(self, other):
        if not isinstance(other, MultChar):
            return NotImplemented
        return self.l == other.l and self.unit == other.unit and self.pi_value == other.pi_value

    def __repr__(self):
        return f"MultChar(l={self.l}, conductor={self.conductor}, pi={self.pi_value!r})"


def l_factor(mu):
    """L(mu) = (1 - mu(pi))^(-1) for unramified mu, 1 for ramified mu."""
    if not mu.is_unramified():
        return ONE
    val = ONE - mu.pi_value
    if val.is_zero():
        raise PoleError("L-factor pole: unramified character with mu(pi) = 1")
    return ONE / val


def l_factor_inverse(mu):
    """1/L as a polynomial in mu(pi); never a pole."""
    if not mu.is_unramified():
        return ONE
    return ONE - mu.pi_value


def gauss_sum(chi, psi=None, level=None, conjugate_psi=False):
    """tau(chi, psi) = sum over units mod l^level of chi(u) psi(u / pi^level).

    level defaults to the conductor; a larger level gives the Ramanujan-type
    extended sums.  chi may be a MultChar (unit part is used) or a
    UnitCharacter.  Every summand chi(u) psi(u/pi^n) is a single root of
    unity in Q(zeta_lcm(M, l^n)), so the sum accumulates exponents and
    reduces once.
    """
    from math import gcd

    from .cyclotomic import get_field

    unit = chi.unit if isinstance(chi, MultChar) else chi
    l = unit.p
    n = level if level is not None else unit.conductor
    if n < 1:
        raise ConductorError("gauss_sum needs level >= 1 (unramified epsilon is 1)")
    if psi is not None and getattr(psi, "n_max", n) < n and getattr(psi, "p", l) == l:
        raise ConductorError(f"psi system only reaches level {psi.n_max}")
    m = l**n
    sign = -1 if conjugate_psi else 1
    L = m * unit.M // gcd(m, unit.M)
    field = get_field(L)
    counts = {}
    for u in range(1, m):
        if u % l == 0:
            continue
        e = (unit.exponent_at(u) * (L // unit.M) + sign * u * (L // m)) % L
        counts[e] = counts.get(e, 0) + 1
    acc = field.zero
    for e, c in counts.items():
        acc = field.add(acc, field.scalar_mul(Fraction(c), field.root(e)))
    return Cyc(field, acc)


def epsilon_abelian(chi, psi=None):
    """Unnormalized abelian epsilon: 1 if unramified, chi(pi)^n tau(chi_u, psi) else."""
    if isinstance(chi, UnitCharacter):
        chi = MultChar.from_unit_character(chi)
    n = chi.conductor
    if n == 0:
        return ONE
    return chi.pi_value**n * gauss_sum(chi, psi)


@dataclass(frozen=True)
class Coset:
    """c (1 + p^m) pi^v inside F^x; m = 0 means the full unit circle O^x pi^v."""

    rep: int
    depth: int
    vpi: int


def coset_volume(l, depth):
    """Multiplicative Haar volume with vol(O^x) = 1."""
    if depth == 0:
        return Fraction(1)
    return Fraction(1, (l - 1) * l ** (depth - 1))


def character_coset_integral(chi, coset):
    """int over the coset of chi, with vol(O^x) = 1."""
    if chi.conductor > coset.depth:
        return ZERO
    return chi.value(coset.rep if coset.depth else 1, coset.vpi) * Cyc.from_fraction(
        coset_volume(chi.l, coset.depth)
    )


def inverse_l_eval(mu, terms, check_uniformizer_independence=True):
    """1 - int_{O^x} mu(pi a) h(pi a) da for h = sum of (coeff, char, coset|None).

    A term (c, chi, None) is the global character c * chi; a term
    (c, chi, Coset) is c * chi * indicator.  Orthogonality on finite unit
    quotients makes every integral a finite exact sum.
    """
    total = ZERO
    pure_characters = True
    for coeff, chi, coset in terms:
        prod = mu * chi
        if coset is None:
            # int_{O^x} (mu chi)(pi a) da = (mu chi)(pi) [mu chi unramified]
            contrib = prod.pi_value if prod.is_unramified() else ZERO
        else:
            pure_characters = False
            if coset.vpi != 1:
                contrib = ZERO
            else:
                shifted = Coset(coset.rep, coset.depth, 0)
                contrib = prod.pi_value * character_coset_integral(prod, shifted)
        total = total + _cyc(coeff) * contrib
    out = ONE - total
    if check_uniformizer_independence and pure_characters:
        # recompute against the uniformizer u0 * pi for a unit u0
        alt = ZERO
        for coeff, chi, _ in terms:
            prod = mu * chi
            u0 = 3 if prod.l == 2 else prod.l - 1
            if prod.is_unramified():
                alt = alt + _cyc(coeff) * prod.value(u0, 1)
        if ONE - alt != out:
            raise ConsistencyError("inverse-L value depends on the uniformizer")
    return out


@dataclass(frozen=True)
class SataketData:
    """Satake-type description of the local representation.

    principal: non-normalized induction from (mu1, mu2 |.|^(-1));
    special: the twist St(mu), parameters (mu, mu |.|^(-2));
    supercuspidal: L = 1, epsilon must be supplied when needed.
    """

    kind: str
    mu1: MultChar | None = None
    mu2: MultChar | None = None
    mu: MultChar | None = None
    eps_value: object | None = None
    ad_l_factor: object | None = None

    def __post_init__(self):
        assert self.kind in ("principal", "special", "supercuspidal")
        if self.kind == "principal":
            assert self.mu1 is not None and self.mu2 is not None
        if self.kind == "special":
            assert self.mu is not None

    @property
    def l(self):
        if self.kind == "principal":
            return self.mu1.l
        if self.kind == "special":
            return self.mu.l
        return None

    def satake_characters(self):
        if self.kind == "principal":
            return [self.mu1, self.mu2]
        if self.kind == "special":
            return [self.mu]
        return []

    def central_character(self):
        """mu1 mu2 |.|^(-1) (principal) or mu^2 |.|^(-2) (special)."""
        if self.kind == "principal":
            return self.mu1 * self.mu2.twist_abs(-1)
        if self.kind == "special":
            sq = self.mu * self.mu
            return sq.twist_abs(-2)
        raise MissingDataError("supercuspidal central character must come with the data")

    def rs_l_factor(self, chi):
        """L(Pi tensor chi), s-shifts folded into chi."""
        out = ONE
        for m in self.satake_characters():
            out = out * l_factor(m * chi)
        return out

    def rs_l_inverse(self, chi):
        out = ONE
        for m in self.satake_characters():
            out = out * l_factor_inverse(m * chi)
        return out

    def adjoint_l_factor(self):
        """L(1, Ad): from the parameter {mu1/mu2, 1, mu2/mu1} for principal,
        (1 - l^(-2))^(-1) for special, user-supplied for supercuspidal."""
        if self.kind == "principal":
            l = self.l
            xi = self.mu1 * self.mu2.inverse()
            out = l_factor(MultChar.unramified(l, Fraction(1, l)))  # the trivial slot at s=1
            for m in (xi, xi.inverse()):
                out = out * l_factor(m.twist_abs(1))
            return out
        if self.kind == "special":
            l = self.l
            return ONE / (ONE - Cyc.from_fraction(Fraction(1, l**2)))
        if self.ad_l_factor is None:
            raise MissingDataError("supercuspidal adjoint L-factor not supplied")
        return _cyc(self.ad_l_factor)


def zeta_f(l, s):
    """zeta_F at an integer point: (1 - l^(-s))^(-1)."""
    return ONE / (ONE - Cyc.from_fraction(Fraction(1, l**s)))


def eta_character(l, torus_kind):
    """The quadratic character attached to E/F at this place."""
    if torus_kind == "split":
        return MultChar.unramified(l, 1)
    if torus_kind == "inert":
        return MultChar.unramified(l, -1)
    if torus_kind == "ramified":
        return MultChar.from_unit_character(UnitCharacter.quadratic(l), 1)
    raise ValueError(f"unknown torus kind {torus_kind!r}")
