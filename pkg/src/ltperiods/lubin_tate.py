"""Lubin-Tate formal groups, endomorphisms, logarithms, torsion rings, Theta.

The group law is solved degree by degree from F(f(X), f(Y)) = f(F(X, Y)):
at each total degree m+1 the correction is the degree-(m+1) error divided by
pi^(m+1) - pi, which is pi times a unit, so the construction stays integral.
The differential operator Theta phi = phi'/lambda' is the derivative against
the invariant form; on the multiplicative model it is (1+S) d/dS, which is
also the Serre-Tate disc derivation normalized by D(q) = q for q = 1+S.

Torsion points live intrinsically in quotient rings by the Eisenstein factor
f^(m)/f^(m-1); for the multiplicative model over Q_p that ring is the p^m-th
cyclotomic field under T = zeta - 1.  Torsion arithmetic is always exact
rational: the fixed-modulus precision model does not survive ramified
extensions.

Group objects are immutable after construction up to idempotent memo caches
(endomorphisms, bivariate powers, torsion rings); concurrent recomputation
of a cache entry is harmless, so instances may be shared across threads and
mapped over in parallel.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .cyclotomic import CyclotomicField, PolyQuotient, get_field
from .domains import PadicDomain, RationalDomain
from .errors import (
    ConsistencyError,
    ConstructionError,
    LevelError,
    ModelError,
    PrecisionError,
)
from .series import TruncatedMultiSeries, TruncatedSeries

MULTIPLICATIVE = "multiplicative"
TWO_TERM = "two_term"
GENERIC = "generic"


def _exact_div(ring, x, d):
    """x / d where d = pi * unit; padic mode shifts down by v(d) digits."""
    if isinstance(ring, PadicDomain):
        v = ring.valuation(d)
        if v is None:
            raise PrecisionError("division by an element indistinguishable from 0")
        return ring.mul(ring.shift_down(x, v), ring.inv(ring.shift_down(d, v))) if v else ring.div(x, d)
    return ring.div(x, d)


def _poly_pow_list(ring, f_coeffs, kmax, D):
    """Truncations of f^0..f^kmax at degree D, f given by a coefficient list."""
    one = TruncatedSeries.one(ring, D)
    f = TruncatedSeries(ring, list(f_coeffs), D)
    out = [one]
    for _ in range(kmax):
        out.append(out[-1] * f)
    return out


class NormalizedLog:
    """The logarithm lam (lam(0) = 0, lam'(0) = 1) together with its reversion.

    lam(F(X, Y)) = lam(X) + lam(Y) mod total degree D+1, and
    lam(exp(T)) = T mod T^(D+1).
    """

    __slots__ = ("lam", "exp")

    def __init__(self, lam, exp):
        self.lam = lam
        self.exp = exp

    def __repr__(self):
        return f"NormalizedLog({self.lam!r})"


class FormalGroupLaw:
    """Height-one formal O-module attached to a Frobenius polynomial."""

    def __init__(self, ring, p, pi, q_res, frob_coeffs, D, model, F):
        self.ring = ring
        self.p = p
        self.pi = pi
        self.q_res = q_res
        self.frob_coeffs = tuple(ring.coerce(c) for c in frob_coeffs)
        self.D = D
        self.model = model
        self.F = F
        self._endos = {}
        self._lam = None
        self._lam_inv = None
        self._lam_prime_inv = None
        self._F_pows = None
        self._torsion = {}

    def __repr__(self):
        return f"FormalGroupLaw(p={self.p}, q={self.q_res}, D={self.D}, model={self.model})"

    def descriptor(self):
        return {
            "p": self.p,
            "pi": str(self.pi if not isinstance(self.ring, PadicDomain) else self.pi[0]),
            "q_res": self.q_res,
            "frobenius": [str(c) if not isinstance(self.ring, PadicDomain) else str(c[0]) for c in self.frob_coeffs],
            "D": self.D,
        }

    # -- logarithm ---------------------------------------------------------

    @property
    def log(self):
        """NormalizedLog: lam with lam(0)=0, lam'(0)=1, lam(F(X,Y)) = lam(X)+lam(Y)."""
        if self._lam is None:
            r = self.ring
            D = self.D
            if self.model == MULTIPLICATIVE:
                if isinstance(r, PadicDomain):
                    raise PrecisionError("log(1+T) needs 1/k; ExactRational only")
                coeffs = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, D + 2)]
                self._lam = TruncatedSeries(r, coeffs, D + 1)
            else:
                # lam_n (pi - pi^n) = sum_{k<n} lam_k [T^n] f^k
                pows = _poly_pow_list(r, self.frob_coeffs, D + 1, D + 1)
                lam = [r.zero, r.one] + [r.zero] * D
                for n in range(2, D + 2):
                    s = r.zero
                    for k in range(1, n):
                        if not r.is_zero(lam[k]):
                            s = r.add(s, r.mul(lam[k], pows[k][n]))
                    pi_n = _ring_pow(r, self.pi, n)
                    lam[n] = _exact_div(r, s, r.sub(self.pi, pi_n))
                self._lam = TruncatedSeries(r, lam, D + 1)
        return self._lam

    @property
    def exp(self):
        """Reversion of the logarithm (lt_exp)."""
        if self._lam_inv is None:
            self._lam_inv = self.log.revert()
        return self._lam_inv

    def normalized_log(self):
        """The logarithm/exponential pair as one carrier."""
        return NormalizedLog(self.log, self.exp)

    def _lam_prime_inverse(self):
        if self._lam_prime_inv is None:
            if self.model == MULTIPLICATIVE:
                # lam' = 1/(1+T); inverse is 1+T, integral in every mode
                self._lam_prime_inv = TruncatedSeries(self.ring, [1, 1], self.D)
            else:
                self._lam_prime_inv = self.log.derivative().inverse()
        return self._lam_prime_inv

    # -- endomorphisms ------------------------------------------------------

    def endo(self, a):
        """[a](T): the unique series a*T + ... commuting with the Frobenius."""
        r = self.ring
        if isinstance(a, int):
            key = ("i", a)
        elif isinstance(a, Fraction):
            key = ("f", a)
        else:
            key = ("r", r.coerce(a))
        if key in self._endos:
            return self._endos[key]
        D = self.D
        if self.model == MULTIPLICATIVE and isinstance(a, int) and a >= 0:
            # (1+T)^a - 1, exact integer binomials
            coeffs = [comb(a, k) if k <= a else 0 for k in range(D + 1)]
            coeffs[0] = 0
            out = TruncatedSeries(r, coeffs, D)
        elif (
            self.model == MULTIPLICATIVE
            and isinstance(a, (int, Fraction))
            and not isinstance(r, PadicDomain)
        ):
            # binomial series (1+T)^a - 1
            a = Fraction(a)
            coeffs = [Fraction(0), a]
            c = a
            for k in range(2, D + 1):
                c = c * (a - k + 1) / k
                coeffs.append(c)
            out = TruncatedSeries(r, coeffs, D)
        else:
            a_elem = r.coerce(a)
            h = [r.zero, a_elem] + [r.zero] * (D - 1)
            f_series = TruncatedSeries(r, list(self.frob_coeffs), D)
            for m in range(1, D):
                cur = TruncatedSeries(r, h, D)
                lhs = cur.compose(f_series)  # [a](f(T))
                rhs = f_series.compose(cur)  # f([a](T))
                e = rhs - lhs
                for j in range(m + 1):
                    if not r.is_zero(e.coeffs[j]):
                        raise ConsistencyError(
                            f"endo recursion: residual at degree {j} <= {m}"
                        )
                pi_m1 = _ring_pow(r, self.pi, m + 1)
                h[m + 1] = _exact_div(r, e.coeffs[m + 1], r.sub(pi_m1, self.pi))
            out = TruncatedSeries(r, h, D)
        self._endos[key] = out
        return out

    # -- Theta and translations ---------------------------------------------

    def theta(self, phi):
        """Theta(phi) = phi'(S)/lam'(S).

        On the multiplicative model Theta = (1+S) d/dS preserves polynomial
        degree, so the result stays on the same truncation grid and is exact.
        Generic models divide by lam', an infinite unit series, and lose one
        reportable degree.
        """
        r = phi.ring
        D = phi.trunc
        if self.model == MULTIPLICATIVE:
            out = []
            for k in range(D + 1):
                nxt = phi.coeffs[k + 1] if k + 1 <= D else r.zero
                out.append(r.add(r.mul(r.from_int(k + 1), nxt), r.mul(r.from_int(k), phi.coeffs[k])))
            return TruncatedSeries(r, out, D)
        d = phi.derivative()
        inv = self._lam_prime_inverse()
        return d * TruncatedSeries(phi.ring, list(inv.coeffs), d.trunc)

    def F_powers(self, upto):
        """Cached bivariate powers F^0..F^upto, truncated at total degree D."""
        if self._F_pows is None:
            one = TruncatedMultiSeries.constant(self.ring, 2, self.D, self.ring.one)
            self._F_pows = [one]
        while len(self._F_pows) <= upto:
            self._F_pows.append(self._F_pows[-1] * self.F)
        return self._F_pows[: upto + 1]

    def compose_with_F(self, phi):
        """phi(F(X,Y)) as a bivariate truncation (the Mellin two-variable route)."""
        pows = self.F_powers(phi.trunc)
        r = self.ring
        acc = TruncatedMultiSeries.zero(r, 2, self.D)
        for k, c in enumerate(phi.coeffs):
            if not r.is_zero(c):
                acc = acc + pows[k].scale(c)
        return acc

    def theta_bivariate_y(self, m):
        """Theta in the Y variable on a bivariate truncation.

        Multiplicative model: (1+Y) d/dY term by term, exact on the same
        total-degree grid; generic models lose one degree to the lam' division.
        """
        r = self.ring
        if self.model == MULTIPLICATIVE:
            out = {}
            for (i, j), c in m.terms.items():
                if j:
                    # Y^j -> j Y^j contribution
                    key = (i, j)
                    out[key] = r.add(out.get(key, r.zero), r.mul(r.from_int(j), c))
                    # Y^j -> j Y^(j-1) contribution
                    key = (i, j - 1)
                    out[key] = r.add(out.get(key, r.zero), r.mul(r.from_int(j), c))
            return TruncatedMultiSeries(r, 2, m.trunc, out)
        d = m.partial(1)
        inv = self._lam_prime_inverse()
        lifted = TruncatedMultiSeries.zero(self.ring, 2, d.trunc).lift_univariate(
            TruncatedSeries(self.ring, list(inv.coeffs), d.trunc), 1
        )
        return d * lifted

    # -- torsion -------------------------------------------------------------

    def torsion_ring(self, m):
        if m < 1:
            raise LevelError("torsion level must be >= 1")
        if m not in self._torsion:
            self._torsion[m] = TorsionRing(self, m)
        return self._torsion[m]


def _ring_pow(r, a, n):
    out = r.one
    for _ in range(n):
        out = r.mul(out, a)
    return out


def _poly_mul_q(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_compose_q(outer, inner):
    acc = [Fraction(0)]
    for c in reversed(outer):
        acc = _poly_mul_q(acc, inner)
        if not acc:
            acc = [Fraction(0)]
        acc[0] += Fraction(c)
    while len(acc) > 1 and acc[-1] == 0:
        acc.pop()
    return acc


def _poly_divmod_q(num, den):
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / den[-1]
        q[k] = c
        if c:
            for j, y in enumerate(den):
                num[k + j] -= c * y
    while num and num[-1] == 0:
        num.pop()
    while len(q) > 1 and q[-1] == 0:
        q.pop()
    return q, num


class TorsionRing:
    """Quotient by the level-m Eisenstein factor of f^(m), with its torsion point.

    For the multiplicative model the backing ring is the p^m-th cyclotomic
    field and t_m = zeta - 1; psi-values are the multiplicative coordinates
    1 + point.  Two-term Frobenius polynomials pi*T + T^q get a direct
    Eisenstein quotient, over Q(zeta_{q-1}) when the [p]-kernel needs the
    tame scalars.
    """

    def __init__(self, group, m):
        if isinstance(group.ring, PadicDomain):
            raise PrecisionError("torsion arithmetic is ExactRational only")
        self.group = group
        self.level = m
        p = group.p
        f_m = _poly_compose_iterate(group.frob_coeffs, m)
        f_prev = _poly_compose_iterate(group.frob_coeffs, m - 1)
        q, rem = _poly_divmod_q(f_m, f_prev)
        if rem:
            raise ConstructionError("f^(m-1) does not divide f^(m)")
        self.modulus = tuple(q)  # Eisenstein factor, monic
        if group.model == MULTIPLICATIVE:
            self.ring = get_field(p**m)
            self.point = self.ring.sub(self.ring.root(1), self.ring.one)
        else:
            if group.q_res - 1 > 2:
                base_ring = get_field(group.q_res - 1)
            else:
                base_ring = RationalDomain()
            self.ring = PolyQuotient(base_ring, [base_ring.coerce(c) for c in q])
            self.point = self.ring.gen()
        # check the defining torsion property exactly
        if not self.ring.is_zero(self._eval_poly(f_m, self.point)):
            raise ConsistencyError("[p^m](t_m) != 0 in the torsion ring")
        if m >= 1 and self.ring.is_zero(self._eval_poly(f_prev, self.point)):
            raise ConsistencyError("[p^(m-1)](t_m) = 0 in the torsion ring")

    def _eval_poly(self, coeffs, x):
        R = self.ring
        acc = R.zero
        for c in reversed([Fraction(c) for c in coeffs]):
            acc = R.add(R.mul(acc, x), R.from_fraction(c))
        return acc

    def lift(self, c):
        """Base coefficient (Fraction) into the torsion ring."""
        return self.ring.from_fraction(Fraction(c))

    def point_for(self, c, j=None):
        """nu_+(c / p^j) as a ring element (j defaults to the level)."""
        j = self.level if j is None else j
        if j > self.level:
            raise LevelError("requested torsion level exceeds the ring level")
        g = self.group
        if g.model == MULTIPLICATIVE:
            e = (c * g.p ** (self.level - j)) % (g.p**self.level)
            return self.ring.sub(self.ring.root(e), self.ring.one)
        # [c](t) for a truncated endomorphism series is not exact in the ring
        raise ModelError("general torsion points need the multiplicative model")

    def psi_value(self, c, j=None):
        """Multiplicative coordinate 1 + nu_+(c/p^j); multiplicative model only."""
        if self.group.model != MULTIPLICATIVE:
            raise ModelError("psi-values need the multiplicative Q_p model")
        j = self.level if j is None else j
        e = (c * self.group.p ** (self.level - j)) % (self.group.p**self.level)
        return self.ring.root(e)

    def kernel_of_p(self):
        """All points of Ker[p] as ring elements (including 0)."""
        g = self.group
        R = self.ring
        if g.model == MULTIPLICATIVE:
            step = g.p ** (self.level - 1)
            return [R.sub(R.root(c * step), R.one) for c in range(g.p)]
        if g.model == TWO_TERM:
            # level-1 point inside the level-m ring; its mu_{q-1}-scalings
            # exhaust Ker[p] since E_1(T) = pi + T^(q-1)
            fp = _poly_compose_iterate(g.frob_coeffs, self.level - 1)
            s = self._eval_poly(fp, self.point)
            q1 = g.q_res - 1
            base = R.base
            pts = [R.zero]
            if isinstance(base, CyclotomicField):
                scalars = [base.root(c) for c in range(q1)]
            else:
                scalars = [base.coerce(1)] if q1 == 1 else [base.coerce(1), base.coerce(-1)]
            for z in scalars:
                pts.append(R.scalar_mul(z, s))
            return pts
        raise ModelError("[p]-kernel enumeration needs multiplicative or two-term models")


def _poly_compose_iterate(frob_coeffs, m):
    f = [Fraction(c) for c in frob_coeffs]
    out = [Fraction(0), Fraction(1)]
    for _ in range(m):
        out = _poly_compose_q(f, out)
    return out


def _is_multiplicative(frob, p, ring):
    want = [comb(p, k) for k in range(p + 1)]
    want[0] = 0
    if len(frob) != p + 1:
        return False
    return all(ring.eq(ring.coerce(want[k]), ring.coerce(frob[k])) for k in range(p + 1))


def _is_two_term(frob, pi, q, ring):
    if len(frob) != q + 1:
        return False
    for k, c in enumerate(frob):
        c = ring.coerce(c)
        if k == 1:
            if not ring.eq(c, ring.coerce(pi)):
                return False
        elif k == q:
            if not ring.eq(c, ring.one):
                return False
        elif not ring.is_zero(c):
            return False
    return True


def lt_construct(p, pi, q_res, frobenius_poly, D, ring=None):
    """Solve the Lubin-Tate functional equation degree by degree.

    frobenius_poly must satisfy f = pi*T mod deg 2 and f = T^q_res mod pi;
    the returned group satisfies the abelian-group axioms mod total degree
    D+1 and carries the logarithm and [a]-endomorphisms.
    """
    ring = ring or RationalDomain()
    frob = [ring.coerce(c) for c in frobenius_poly]
    if len(frob) < 2 or not ring.is_zero(frob[0]) or not ring.eq(frob[1], ring.coerce(pi)):
        raise ConstructionError("frobenius polynomial must be pi*T mod degree 2")
    # f = T^q mod pi
    for k, c in enumerate(frob):
        target = ring.one if k == q_res else ring.zero
        if not _divisible_by_pi(ring, ring.sub(c, target), pi, p):
            raise ConstructionError(f"coefficient {k} violates f = T^q mod pi")

    if _is_multiplicative(frob, p, ring) and q_res == p:
        model = MULTIPLICATIVE
        F = TruncatedMultiSeries(
            ring, 2, D, {(1, 0): ring.one, (0, 1): ring.one, (1, 1): ring.one}
        )
        return FormalGroupLaw(ring, p, ring.coerce(pi), q_res, frob, D, model, F)

    model = TWO_TERM if _is_two_term(frob, pi, q_res, ring) else GENERIC
    pi_e = ring.coerce(pi)
    F = TruncatedMultiSeries(
        ring, 2, D, {(1, 0): ring.one, (0, 1): ring.one}
    )
    f_uni = TruncatedSeries(ring, frob, D)
    # bivariate images f(X), f(Y)
    fx = TruncatedMultiSeries(
        ring, 2, D, {(k, 0): c for k, c in enumerate(frob) if not ring.is_zero(c)}
    )
    fy = TruncatedMultiSeries(
        ring, 2, D, {(0, k): c for k, c in enumerate(frob) if not ring.is_zero(c)}
    )
    for m in range(1, D):
        lhs = F.compose_univariate_outer(f_uni)  # f(F)
        rhs = F.subst_multi([fx, fy])  # F(f(X), f(Y))
        e = lhs - rhs
        delta = {}
        for exp, c in e.terms.items():
            deg = sum(exp)
            if deg <= m:
                raise ConsistencyError(
                    f"group-law recursion: residual at total degree {deg} <= {m}"
                )
            if deg == m + 1:
                delta[exp] = c
        if delta:
            pi_m1 = _ring_pow(ring, pi_e, m + 1)
            den = ring.sub(pi_m1, pi_e)
            corr = {exp: _exact_div(ring, c, den) for exp, c in delta.items()}
            F = F + TruncatedMultiSeries(ring, 2, D, corr)
    return FormalGroupLaw(ring, p, pi_e, q_res, frob, D, model, F)


def _divisible_by_pi(ring, c, pi, p):
    if ring.is_zero(c):
        return True
    if isinstance(ring, PadicDomain):
        return c[0] % ring.p == 0
    q = Fraction(c) / Fraction(pi)
    return q.denominator % p != 0


def multiplicative_group(p, D, ring=None):
    """The multiplicative model: f = (1+T)^p - 1, F = X + Y + XY exactly."""
    frob = [comb(p, k) for k in range(p + 1)]
    frob[0] = 0
    return lt_construct(p, p, p, frob, D, ring=ring)


def lt_endo(group, a):
    """Spec-level wrapper for [a]."""
    return group.endo(a)


def theta(group, phi):
    """Spec-level wrapper for the Lubin-Tate differential operator."""
    return group.theta(phi)


class SerreTateDerivation:
    """The disc avatar of the deformation derivation D(l) with l = 1.

    Acts on series exactly as Theta; on the multiplicative model the
    Serre-Tate coordinate is q = 1 + S and D(q) = q.
    """

    def __init__(self, group):
        self.group = group

    def __call__(self, phi):
        return self.group.theta(phi)

    def q_coordinate(self, trunc=None):
        if self.group.model != MULTIPLICATIVE:
            raise ModelError("the q-coordinate needs the multiplicative model")
        D = self.group.D if trunc is None else trunc
        return TruncatedSeries(self.group.ring, [1, 1], D)


def st_derivation(group):
    return SerreTateDerivation(group)
