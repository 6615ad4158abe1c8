"""Finite-level anticyclotomic distributions and universal torus periods.

A CM coset model carries a finite abelian group C acting simply transitively
on a point set Y, one stable disc function per point (the residue-disc
restriction data), and optional per-point tame twists.  The universal torus
period of a character (tame part, unit-part twist chi_p, weight k) is the
C-average of the character-twisted Mellin transforms evaluated at the disc
origin, the canonical point of the ordinary parameterization.  The weight-0
consistency check recomputes the period through stable Theta-primitives
(the disc-level form of the statement that both routes are Coleman integrals
of the same form).

The distribution algebra is modeled at one finite level: Delta-indexed
families of disc functions, evaluation factoring through one component, and
convolution as componentwise series multiplication under the Amice
identification (Diracs multiply as (1+S)^u (1+S)^v = (1+S)^(u+v)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .characters import FiniteCharacter, UnitCharacter
from .cyclotomic import Cyc
from .domains import RationalDomain
from .errors import ConsistencyError, PoleError, StabilityError
from .mellin import (
    DiscFunction,
    is_stable,
    mellin_at_character,
    stable_primitive,
    theta_power,
)

ONE = Cyc.from_fraction(1)
ZERO = Cyc.from_fraction(0)


def _cyc(x):
    return x if isinstance(x, Cyc) else Cyc.from_fraction(Fraction(x))


def _origin_value(disc_fn):
    """Value at S = 0 as a Cyc (descending cyclotomic coefficients when possible)."""
    c = disc_fn.value_at_origin()
    ring = disc_fn.series.ring
    if isinstance(ring, RationalDomain):
        return Cyc.from_fraction(c)
    if hasattr(ring, "M"):
        return Cyc(ring, c)
    raise ConsistencyError("universal periods need rational or cyclotomic coefficients")


@dataclass(frozen=True)
class CMPoint:
    ident: object
    c_elem: tuple
    phi: DiscFunction
    tame: object = 1


class CMCosetModel:
    """Simply transitive C-set with per-point stable residue-disc functions."""

    def __init__(self, group, points):
        self.group = group
        self.points = tuple(points)
        if len(self.points) != group.order:
            raise ValueError("|Y| must equal |C| (simply transitive action)")
        seen = {p.c_elem for p in self.points}
        if len(seen) != len(self.points):
            raise ValueError("points must carry distinct C-coordinates")
        for p in self.points:
            ok, _ = is_stable(p.phi)
            if not ok:
                raise StabilityError(f"phi at point {p.ident!r} is not stable")

    def translated(self, c):
        """Precompose the C-action with translation by c (moves the disc data)."""
        by_coord = {p.c_elem: p for p in self.points}
        new_points = []
        for p in self.points:
            src = by_coord[self.group.add(p.c_elem, c)]
            new_points.append(CMPoint(p.ident, p.c_elem, src.phi, src.tame))
        return CMCosetModel(self.group, new_points)


@dataclass(frozen=True)
class ToyCharacter:
    """Tame character of C, unit-part twist chi_p, and an integer weight."""

    tame: FiniteCharacter
    chi_p: UnitCharacter
    weight: int


def universal_period_eval(model, chi, psi):
    """|Y|^(-1) sum over Y of tame(y) * (twisted Mellin of phi_y at the origin)."""
    if chi.weight < 0:
        raise ValueError("universal periods interpolate weights k >= 0")
    acc = ZERO
    for p in model.points:
        m = mellin_at_character(p.phi, chi.chi_p, chi.weight, psi)
        acc = acc + chi.tame.value(p.c_elem) * _cyc(p.tame) * _origin_value(m)
    return acc / Fraction(len(model.points))


def universal_period_bruteforce(model, chi, psi):
    """Independent double-sum route: explicit Gauss weights times translate values.

    Evaluates p^(-n) sum_x sum_u chi_p(u) psi(-xu) (Theta^k phi_y)(nu_+(x))
    pointwise at the origin of each translated disc, then averages with the
    tame weights.  No shared code with mellin_at_character beyond Theta.
    """
    p = None
    acc = ZERO
    for pt in model.points:
        group = pt.phi.group
        p = group.p
        n = chi.chi_p.conductor
        th = theta_power(pt.phi, chi.weight).series
        if n == 0:
            val = Cyc.from_fraction(th.coeffs[0])
        else:
            pn = p**n
            val = ZERO
            for c in range(pn):
                g = ZERO
                for u in range(1, pn):
                    if u % p:
                        g = g + chi.chi_p.value(u) * Cyc.root_of_unity(pn, -c * u)
                # (Theta^k phi)(zeta^c - 1) by direct polynomial evaluation
                z = Cyc.root_of_unity(pn, c) - 1
                horner = Cyc.from_fraction(0)
                for coeff in reversed(th.coeffs):
                    horner = horner * z + Fraction(coeff)
                val = val + g * horner
            val = val / Fraction(pn)
        acc = acc + chi.tame.value(pt.c_elem) * _cyc(pt.tame) * val
    return acc / Fraction(len(model.points))


def weight0_waldspurger_check(model, chi, psi):
    """Weight-0 period two ways: directly, and through stable Theta-primitives.

    Route (b) replaces each phi_y by its stable primitive and reads the twist
    at weight 1; both are evaluations of a Coleman primitive of the same
    form, so the values must agree.  Returns (value, flag).
    """
    if chi.weight != 0:
        raise ValueError("the Waldspurger consistency check is a weight-0 statement")
    direct = universal_period_eval(model, chi, psi)
    acc = ZERO
    for p in model.points:
        prim = stable_primitive(p.phi)
        m = mellin_at_character(prim, chi.chi_p, 1, psi)
        acc = acc + chi.tame.value(p.c_elem) * _cyc(p.tame) * _origin_value(m)
    via_primitive = acc / Fraction(len(model.points))
    flag = direct == via_primitive
    if not flag:
        raise ConsistencyError("weight-0 period routes disagree")
    return direct, flag


def toy_l_ratio_eval(p_plus, p_minus, q_value):
    """P+(chi) P-(chi) / Q(chi); raises on excluded characters with Q = 0."""
    q_value = _cyc(q_value)
    if q_value.is_zero():
        raise PoleError("excluded character: Q(chi) = 0")
    return _cyc(p_plus) * _cyc(p_minus) / q_value


class AnticycDistribution:
    """Delta-indexed Amice components; evaluation factors through one component."""

    def __init__(self, delta_group, components):
        self.delta_group = delta_group
        self.components = dict(components)
        for delta in delta_group.characters():
            if delta not in self.components:
                raise ValueError("every Delta-component needs an Amice series")

    def component(self, delta):
        return self.components[delta]

    def evaluate(self, delta, chi_p, k, psi):
        """Evaluation at the character (delta, chi_p <k>)."""
        m = mellin_at_character(self.components[delta], chi_p, k, psi)
        return _origin_value(m)

    def convolve(self, other):
        """Convolution = componentwise series multiplication (Amice side)."""
        assert self.delta_group == other.delta_group
        out = {}
        for delta, f in self.components.items():
            g = other.components[delta]
            out[delta] = DiscFunction(f.group, f.series * g.series)
        return AnticycDistribution(self.delta_group, out)

    def __add__(self, other):
        assert self.delta_group == other.delta_group
        return AnticycDistribution(
            self.delta_group,
            {d: f + other.components[d] for d, f in self.components.items()},
        )


def character_twist_series(phi, omega, psi):
    """The Amice series of the omega-twisted measure (the k = 0 character sum)."""
    return mellin_at_character(phi, omega, 0, psi)


def weight_map_bw(phi, omega_p, delta_group, psi):
    """Diagonal embedding of a local distribution with the omega_p-twist on Diracs.

    Sends the measure with Amice series phi to the family whose every
    Delta-component is the omega_p-twist of phi; on a Dirac [u] the twist
    multiplies by omega_p(u), so evaluation at (delta, chi_p <k>) returns
    omega_p(u) chi_p(u) u^k.
    """
    twisted = character_twist_series(phi, omega_p, psi) if not omega_p.is_trivial() else phi
    return AnticycDistribution(
        delta_group, {delta: twisted for delta in delta_group.characters()}
    )
