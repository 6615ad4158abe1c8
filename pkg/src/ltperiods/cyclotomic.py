"""Cyclotomic quotient rings and exact root-of-unity arithmetic.

CyclotomicField(M) is Q[Z]/Phi_M(Z) with the distinguished root zeta = Z.
CyclotomicRing(p, n) is the M = p^n case, the home of torsion-point values
psi(x) and of character values of p-power order.  Elements are coefficient
tuples against the power basis 1, zeta, ..., zeta^(phi(M)-1); all arithmetic
is exact over Fraction.

Cyc is a small value wrapper used by the character/L-factor modules: a pair
(field, coeffs) whose operators lift both operands into the compositum
CyclotomicField(lcm(M1, M2)) automatically, so Gauss sums, epsilon factors
and rational constants mix freely.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import LevelError

def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_divmod_exact(num, den):
    """Quotient of integer polynomials known to divide exactly."""
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = num[k + len(den) - 1]
        assert c % den[-1] == 0
        q[k] = c // den[-1]
        if q[k]:
            for j, y in enumerate(den):
                num[k + j] -= q[k] * y
    assert not any(num), "division was not exact"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M):
    """Coefficients (ascending) of Phi_M(X) as ints, via Phi_M = (X^M-1)/prod_{d|M, d<M} Phi_d."""
    if M < 1:
        raise LevelError("cyclotomic index must be >= 1")
    if M == 1:
        return (-1, 1)
    num = [-1] + [0] * (M - 1) + [1]
    den = [1]
    for d in range(1, M):
        if M % d == 0:
            den = _poly_mul(den, list(cyclotomic_polynomial(d)))
    return tuple(_poly_divmod_exact(num, den))


def euler_phi(M):
    return len(cyclotomic_polynomial(M)) - 1


class PolyQuotient:
    """base_ring[T] / (modulus), modulus monic; elements are coefficient tuples.

    Generic enough for cyclotomic fields over Q and for Eisenstein torsion
    quotients over Q or over a cyclotomic field (nested coefficients).
    """

    def __init__(self, base, modulus, var="T"):
        modulus = tuple(base.coerce(c) for c in modulus)
        if not base.eq(modulus[-1], base.one):
            raise ValueError("modulus must be monic")
        self.base = base
        self.modulus = modulus
        self.degree = len(modulus) - 1
        self.var = var
        # rows[e] = coefficients of T^e reduced mod modulus, for e < 2*degree-1
        self._pow_rows = None

    @property
    def mode(self):
        return getattr(self.base, "mode", "rational")

    def __eq__(self, other):
        return (
            isinstance(other, PolyQuotient)
            and self.base == other.base
            and len(self.modulus) == len(other.modulus)
            and all(self.base.eq(a, b) for a, b in zip(self.modulus, other.modulus))
        )

    def __hash__(self):
        return hash((type(self).__name__, self.degree))

    def __repr__(self):
        return f"PolyQuotient(deg={self.degree}, var={self.var})"

    def _rows(self):
        if self._pow_rows is None:
            b = self.base
            d = self.degree
            rows = [
                tuple(b.one if i == e else b.zero for i in range(d))
                for e in range(d)
            ]
            # T^e for d <= e <= 2d-2, by repeated reduction of the top term
            top = [b.neg(c) for c in self.modulus[:-1]]
            for _ in range(d - 1):
                prev = rows[-1]
                shifted = [b.zero] + list(prev[:-1])
                lead = prev[-1]
                rows.append(
                    tuple(b.add(shifted[i], b.mul(lead, top[i])) for i in range(d))
                )
            self._pow_rows = rows
        return self._pow_rows

    @property
    def zero(self):
        b = self.base
        return tuple(b.zero for _ in range(self.degree))

    @property
    def one(self):
        b = self.base
        return tuple(b.one if i == 0 else b.zero for i in range(self.degree))

    def gen(self):
        b = self.base
        if self.degree == 1:
            # T = -modulus[0] in the quotient
            return (b.neg(self.modulus[0]),)
        return tuple(b.one if i == 1 else b.zero for i in range(self.degree))

    def from_int(self, n):
        b = self.base
        return tuple(b.from_int(n) if i == 0 else b.zero for i in range(self.degree))

    def from_fraction(self, q):
        b = self.base
        return tuple(b.from_fraction(q) if i == 0 else b.zero for i in range(self.degree))

    def inject(self, c):
        """Embed a base-ring element as a constant."""
        b = self.base
        return tuple(c if i == 0 else b.zero for i in range(self.degree))

    def coerce(self, x):
        if isinstance(x, tuple) and len(x) == self.degree:
            return x
        if isinstance(x, (int, Fraction)):
            return self.from_fraction(Fraction(x))
        return self.inject(self.base.coerce(x))

    def from_poly(self, coeffs):
        """Reduce an arbitrary-degree coefficient list mod the modulus."""
        b = self.base
        d = self.degree
        coeffs = [b.coerce(c) for c in coeffs]
        while len(coeffs) > d:
            lead = coeffs.pop()
            if not b.is_zero(lead):
                k = len(coeffs) - d
                for i in range(d):
                    coeffs[k + i] = b.sub(coeffs[k + i], b.mul(lead, self.modulus[i]))
        coeffs += [b.zero] * (d - len(coeffs))
        return tuple(coeffs)

    def add(self, a, c):
        b = self.base
        return tuple(b.add(x, y) for x, y in zip(a, c))

    def sub(self, a, c):
        b = self.base
        return tuple(b.sub(x, y) for x, y in zip(a, c))

    def neg(self, a):
        b = self.base
        return tuple(b.neg(x) for x in a)

    def mul(self, a, c):
        b = self.base
        d = self.degree
        if d == 1:
            return (b.mul(a[0], c[0]),)
        prod = [b.zero] * (2 * d - 1)
        for i, x in enumerate(a):
            if not b.is_zero(x):
                for j, y in enumerate(c):
                    if not b.is_zero(y):
                        prod[i + j] = b.add(prod[i + j], b.mul(x, y))
        rows = self._rows()
        out = list(prod[:d])
        for e in range(d, 2 * d - 1):
            if not b.is_zero(prod[e]):
                row = rows[e]
                for i in range(d):
                    out[i] = b.add(out[i], b.mul(prod[e], row[i]))
        return tuple(out)

    def scalar_mul(self, s, a):
        b = self.base
        return tuple(b.mul(s, x) for x in a)

    def pow(self, a, n):
        r = self.one
        while n:
            if n & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n >>= 1
        return r

    def div_int(self, a, n):
        b = self.base
        return tuple(b.div_int(x, n) for x in a)

    def eq(self, a, c):
        b = self.base
        return all(b.eq(x, y) for x, y in zip(a, c))

    def is_zero(self, a):
        b = self.base
        return all(b.is_zero(x) for x in a)

    def inv(self, a):
        """Inverse by extended Euclid over the fraction-field base (Q or a field)."""
        b = self.base
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of 0 in quotient ring")

        def pdivmod(u, v):
            u = list(u)
            dv = len(v) - 1
            lead_inv = b.inv(v[-1])
            q = [b.zero] * max(len(u) - dv, 1)
            for k in range(len(u) - dv - 1, -1, -1):
                f = b.mul(u[k + dv], lead_inv)
                q[k] = f
                if not b.is_zero(f):
                    for j in range(dv + 1):
                        u[k + j] = b.sub(u[k + j], b.mul(f, v[j]))
            r = _trim(u, b)
            return q, r

        def _trim(u, b):
            i = len(u)
            while i > 0 and b.is_zero(u[i - 1]):
                i -= 1
            return u[:i] or [b.zero]

        r0, r1 = list(self.modulus), _trim(list(a), b)
        s0, s1 = [b.zero], [b.one]
        while len(r1) > 1 or not b.is_zero(r1[0]):
            q, r = pdivmod(r0, r1)
            qs = _poly_mul_ring(q, s1, b)
            s = [
                b.sub(s0[i] if i < len(s0) else b.zero, qs[i] if i < len(qs) else b.zero)
                for i in range(max(len(s0), len(qs)))
            ]
            r0, r1, s0, s1 = r1, r, s1, _trim(s, b)
        if len(r0) != 1:
            raise ZeroDivisionError("element is not invertible (gcd has positive degree)")
        c = b.inv(r0[0])
        return self.from_poly([b.mul(c, x) for x in s0])

    def div(self, a, c):
        return self.mul(a, self.inv(c))

    def try_base(self, a):
        """The base-ring element this constant equals, or None if non-constant."""
        b = self.base
        if all(b.is_zero(x) for x in a[1:]):
            return a[0]
        return None

    def repr_elem(self, a):
        b = self.base
        parts = []
        for i, x in enumerate(a):
            if not b.is_zero(x):
                s = b.repr_elem(x) if hasattr(b, "repr_elem") else str(x)
                parts.append(s if i == 0 else f"({s})*{self.var}^{i}")
        return " + ".join(parts) if parts else "0"


def _poly_mul_ring(a, c, b):
    out = [b.zero] * (len(a) + len(c) - 1)
    for i, x in enumerate(a):
        if not b.is_zero(x):
            for j, y in enumerate(c):
                if not b.is_zero(y):
                    out[i + j] = b.add(out[i + j], b.mul(x, y))
    return out


class CyclotomicField(PolyQuotient):
    """Q(zeta_M) = Q[Z]/Phi_M(Z), with cached powers of zeta."""

    def __init__(self, M):
        from .domains import RationalDomain

        self.M = M
        super().__init__(RationalDomain(), cyclotomic_polynomial(M), var="z")
        self._zeta_pows = None

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and self.M == other.M

    def __hash__(self):
        return hash(("CyclotomicField", self.M))

    def __repr__(self):
        return f"CyclotomicField({self.M})"

    def root(self, j=1):
        """zeta_M^j as an element (exponent taken mod M)."""
        if self._zeta_pows is None:
            pows = [self.one]
            z = self.gen() if self.M > 1 else self.one
            for _ in range(self.M - 1):
                pows.append(self.mul(pows[-1], z))
            self._zeta_pows = pows
        return self._zeta_pows[j % self.M]

    def lift_from(self, other, a):
        """Image of a under Q(zeta_{M'}) -> Q(zeta_M), zeta_{M'} -> zeta_M^(M/M')."""
        if other.M == self.M:
            return a
        assert self.M % other.M == 0
        step = self.M // other.M
        out = self.zero
        for i, c in enumerate(a):
            if c:
                out = self.add(out, self.scalar_mul(c, self.root(step * i)))
        return out

    def try_rational(self, a):
        return self.try_base(a)


@lru_cache(maxsize=None)
def get_field(M):
    return CyclotomicField(M)


class CyclotomicRing(CyclotomicField):
    """The p^n-th cyclotomic ring: Q[Z]/Phi_{p^n}, generator zeta of order p^n."""

    def __init__(self, p, n):
        if n < 1:
            raise LevelError("cyclotomic level n must be >= 1")
        self.p = p
        self.n = n
        super().__init__(p**n)

    @property
    def zeta(self):
        return self.root(1)

    def __repr__(self):
        return f"CyclotomicRing(p={self.p}, n={self.n})"


def cyclotomic_ring(p, n):
    """Construct Q[Z]/Phi_{p^n} with its distinguished root of unity."""
    return CyclotomicRing(p, n)


class Cyc:
    """Root-of-unity value: an element of some Q(zeta_M), auto-lifting under arithmetic."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_fraction(cls, q):
        f = get_field(1)
        return cls(f, (Fraction(q),))

    @classmethod
    def root_of_unity(cls, M, j=1):
        f = get_field(M)
        return cls(f, f.root(j))

    @classmethod
    def _coerce(cls, x):
        if isinstance(x, Cyc):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.from_fraction(Fraction(x))
        raise TypeError(f"cannot coerce {x!r} to Cyc")

    def _common(self, other):
        other = Cyc._coerce(other)
        M = self.field.M * other.field.M // gcd(self.field.M, other.field.M)
        f = get_field(M)
        return f, f.lift_from(self.field, self.coeffs), f.lift_from(other.field, other.coeffs)

    def __add__(self, other):
        f, a, b = self._common(other)
        return Cyc(f, f.add(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        f, a, b = self._common(other)
        return Cyc(f, f.sub(a, b))

    def __rsub__(self, other):
        f, a, b = self._common(other)
        return Cyc(f, f.sub(b, a))

    def __neg__(self):
        return Cyc(self.field, self.field.neg(self.coeffs))

    def __mul__(self, other):
        f, a, b = self._common(other)
        return Cyc(f, f.mul(a, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        f, a, b = self._common(other)
        return Cyc(f, f.div(a, b))

    def __rtruediv__(self, other):
        f, a, b = self._common(other)
        return Cyc(f, f.div(b, a))

    def __pow__(self, n):
        if n < 0:
            return Cyc(self.field, self.field.inv(self.field.pow(self.coeffs, -n)))
        return Cyc(self.field, self.field.pow(self.coeffs, n))

    def __eq__(self, other):
        try:
            f, a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return f.eq(a, b)

    def __hash__(self):
        q = self.as_fraction()
        if q is not None:
            return hash(q)
        return hash((self.field.M, self.coeffs))

    @property
    def is_rational(self):
        return self.field.try_rational(self.coeffs) is not None

    def as_fraction(self):
        return self.field.try_rational(self.coeffs)

    def is_zero(self):
        return self.field.is_zero(self.coeffs)

    def __repr__(self):
        q = self.as_fraction()
        if q is not None:
            return f"Cyc({q})"
        return f"Cyc[{self.field.M}]({self.field.repr_elem(self.coeffs)})"
