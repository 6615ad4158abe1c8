"""Truncated power series, Laurent polynomials, multivariate truncations.

A TruncatedSeries holds coefficients c_0..c_D over any ring speaking the
domain protocol; arithmetic never reports coefficients beyond degree D.
Desk-scale semantics: a series is the exact polynomial it stores, so
composition with polynomials of nonzero constant term (torsion translates)
is exact; the truncation degree governs what ring operations may report.

TruncatedMultiSeries is the same idea for several variables with a total
degree bound; it carries the bivariate group laws and the two-variable
route of the interpolation identity.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CompositionError, ReversionError


class TruncatedSeries:
    __slots__ = ("ring", "coeffs", "trunc")

    def __init__(self, ring, coeffs, trunc):
        coeffs = [ring.coerce(c) for c in coeffs[: trunc + 1]]
        coeffs += [ring.zero] * (trunc + 1 - len(coeffs))
        self.ring = ring
        self.coeffs = tuple(coeffs)
        self.trunc = trunc

    @classmethod
    def zero(cls, ring, trunc):
        return cls(ring, [], trunc)

    @classmethod
    def one(cls, ring, trunc):
        return cls(ring, [ring.one], trunc)

    @classmethod
    def variable(cls, ring, trunc):
        return cls(ring, [ring.zero, ring.one], trunc)

    @classmethod
    def from_pairs(cls, ring, pairs, trunc):
        c = [ring.zero] * (trunc + 1)
        for k, v in pairs:
            if k <= trunc:
                c[k] = ring.coerce(v)
        return cls(ring, c, trunc)

    def __repr__(self):
        r = self.ring
        rep = getattr(r, "repr_elem", str)
        parts = [
            f"{rep(c)}*T^{k}" if k else rep(c)
            for k, c in enumerate(self.coeffs)
            if not r.is_zero(c)
        ]
        body = " + ".join(parts) if parts else "0"
        return f"({body} + O(T^{self.trunc + 1}))"

    def __getitem__(self, k):
        return self.coeffs[k] if k <= self.trunc else self.ring.zero

    def retrunc(self, D):
        """Same polynomial data reported up to degree D (pads with zeros)."""
        return TruncatedSeries(self.ring, list(self.coeffs), D)

    def degree(self):
        r = self.ring
        for k in range(self.trunc, -1, -1):
            if not r.is_zero(self.coeffs[k]):
                return k
        return -1

    def __add__(self, other):
        other = self._coerce(other)
        D = min(self.trunc, other.trunc)
        r = self.ring
        return TruncatedSeries(
            r, [r.add(self.coeffs[k], other.coeffs[k]) for k in range(D + 1)], D
        )

    def __sub__(self, other):
        other = self._coerce(other)
        D = min(self.trunc, other.trunc)
        r = self.ring
        return TruncatedSeries(
            r, [r.sub(self.coeffs[k], other.coeffs[k]) for k in range(D + 1)], D
        )

    def __neg__(self):
        r = self.ring
        return TruncatedSeries(r, [r.neg(c) for c in self.coeffs], self.trunc)

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries(self.ring, [self.ring.coerce(other)], self.trunc)

    def __mul__(self, other):
        r = self.ring
        if not isinstance(other, TruncatedSeries):
            s = r.coerce(other)
            return TruncatedSeries(r, [r.mul(s, c) for c in self.coeffs], self.trunc)
        D = min(self.trunc, other.trunc)
        out = [r.zero] * (D + 1)
        a, b = self.coeffs, other.coeffs
        for i in range(min(len(a) - 1, D) + 1):
            if r.is_zero(a[i]):
                continue
            for j in range(min(len(b) - 1, D - i) + 1):
                if not r.is_zero(b[j]):
                    out[i + j] = r.add(out[i + j], r.mul(a[i], b[j]))
        return TruncatedSeries(r, out, D)

    __rmul__ = __mul__

    def scale(self, s):
        r = self.ring
        s = r.coerce(s)
        return TruncatedSeries(r, [r.mul(s, c) for c in self.coeffs], self.trunc)

    def div_int(self, n):
        r = self.ring
        return TruncatedSeries(r, [r.div_int(c, n) for c in self.coeffs], self.trunc)

    def derivative(self):
        r = self.ring
        D = self.trunc
        out = [
            r.mul(r.from_int(k), self.coeffs[k]) for k in range(1, D + 1)
        ]
        return TruncatedSeries(r, out, max(D - 1, 0))

    def antiderivative(self, trunc=None):
        """Termwise primitive with zero constant; divides by 1..D+1."""
        r = self.ring
        D = self.trunc if trunc is None else trunc - 1
        out = [r.zero]
        for k in range(min(D, self.trunc) + 1):
            out.append(r.div_int(self.coeffs[k], k + 1))
        return TruncatedSeries(r, out, len(out) - 1)

    def eq(self, other, upto=None):
        other = self._coerce(other)
        D = min(self.trunc, other.trunc)
        if upto is not None:
            D = min(D, upto)
        r = self.ring
        return all(r.eq(self.coeffs[k], other.coeffs[k]) for k in range(D + 1))

    def is_zero(self, upto=None):
        D = self.trunc if upto is None else min(upto, self.trunc)
        r = self.ring
        return all(r.is_zero(c) for c in self.coeffs[: D + 1])

    def compose(self, inner):
        """g(f) for f = inner with f(0) = 0, exact mod T^(D+1), by Horner."""
        r = self.ring
        if not r.is_zero(inner.coeffs[0]):
            raise CompositionError("inner series must have zero constant term")
        D = min(self.trunc, inner.trunc)
        acc = TruncatedSeries(r, [self.coeffs[self.trunc]], D)
        for k in range(self.trunc - 1, -1, -1):
            acc = acc * inner.retrunc(D) + TruncatedSeries(r, [self.coeffs[k]], D)
        return acc

    def eval_poly(self, x, ring=None):
        """Value of the stored polynomial at a ring element (Horner)."""
        r = ring or self.ring
        acc = r.coerce(self.coeffs[self.trunc])
        for k in range(self.trunc - 1, -1, -1):
            acc = r.add(r.mul(acc, x), r.coerce(self.coeffs[k]))
        return acc

    def inverse(self):
        """Multiplicative inverse; constant term must be a unit."""
        r = self.ring
        c0 = self.coeffs[0]
        inv0 = r.inv(c0)
        D = self.trunc
        out = [inv0] + [r.zero] * D
        for k in range(1, D + 1):
            s = r.zero
            for j in range(1, k + 1):
                if not r.is_zero(self.coeffs[j] if j <= D else r.zero):
                    s = r.add(s, r.mul(self.coeffs[j], out[k - j]))
            out[k] = r.neg(r.mul(inv0, s))
        return TruncatedSeries(r, out, D)

    def revert(self):
        """Compositional inverse h with self(h(T)) = T mod T^(D+1).

        Degree-by-degree: the T^n coefficient of f(h) is linear in h_n with
        unit slope f_1, so only divisions by f'(0) occur (fixed-modulus safe).
        """
        r = self.ring
        if not r.is_zero(self.coeffs[0]):
            raise ReversionError("series must vanish at 0")
        try:
            f1_inv = r.inv(self.coeffs[1])
        except Exception as e:
            raise ReversionError(f"linear coefficient not invertible: {e}") from e
        D = self.trunc
        h = [r.zero, f1_inv] + [r.zero] * (D - 1)
        for n in range(2, D + 1):
            partial = TruncatedSeries(r, h[:n] + [r.zero], n)
            c = self.retrunc(n).compose(partial).coeffs[n]
            h[n] = r.neg(r.mul(f1_inv, c))
        out = TruncatedSeries(r, h, D)
        return out

    def map_coefficients(self, fn, new_ring):
        return TruncatedSeries(new_ring, [fn(c) for c in self.coeffs], self.trunc)


def series_compose(g, f):
    """Spec-level composition wrapper: g(f(T)) with f(0)=0."""
    return g.compose(f)


def series_revert(f):
    """Spec-level reversion wrapper."""
    return f.revert()


class TruncatedMultiSeries:
    """Polynomial in nvars variables truncated at a total degree bound."""

    __slots__ = ("ring", "nvars", "trunc", "terms")

    def __init__(self, ring, nvars, trunc, terms=None):
        self.ring = ring
        self.nvars = nvars
        self.trunc = trunc
        t = {}
        for e, c in (terms or {}).items():
            if sum(e) <= trunc:
                c = ring.coerce(c)
                if not ring.is_zero(c):
                    t[e] = c
        self.terms = t

    @classmethod
    def zero(cls, ring, nvars, trunc):
        return cls(ring, nvars, trunc)

    @classmethod
    def constant(cls, ring, nvars, trunc, c):
        return cls(ring, nvars, trunc, {(0,) * nvars: c})

    @classmethod
    def variable(cls, ring, nvars, trunc, i):
        e = [0] * nvars
        e[i] = 1
        return cls(ring, nvars, trunc, {tuple(e): ring.one})

    def __repr__(self):
        rep = getattr(self.ring, "repr_elem", str)
        parts = [f"{rep(c)}*{e}" for e, c in sorted(self.terms.items())]
        return "MSeries(" + (" + ".join(parts) if parts else "0") + f" + O(deg {self.trunc + 1}))"

    def __add__(self, other):
        r = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = r.add(out[e], c)
                if r.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return TruncatedMultiSeries(r, self.nvars, min(self.trunc, other.trunc), out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        r = self.ring
        return TruncatedMultiSeries(
            r, self.nvars, self.trunc, {e: r.neg(c) for e, c in self.terms.items()}
        )

    def __mul__(self, other):
        r = self.ring
        if not isinstance(other, TruncatedMultiSeries):
            s = r.coerce(other)
            return TruncatedMultiSeries(
                r, self.nvars, self.trunc, {e: r.mul(s, c) for e, c in self.terms.items()}
            )
        D = min(self.trunc, other.trunc)
        small, big = (self.terms, other.terms)
        if len(small) > len(big):
            small, big = big, small
        out = {}
        for e1, c1 in small.items():
            d1 = sum(e1)
            for e2, c2 in big.items():
                if d1 + sum(e2) <= D:
                    e = tuple(a + b for a, b in zip(e1, e2))
                    p = r.mul(c1, c2)
                    if e in out:
                        out[e] = r.add(out[e], p)
                    else:
                        out[e] = p
        return TruncatedMultiSeries(r, self.nvars, D, out)

    __rmul__ = __mul__

    def scale(self, s):
        r = self.ring
        s = r.coerce(s)
        return TruncatedMultiSeries(
            r, self.nvars, self.trunc, {e: r.mul(s, c) for e, c in self.terms.items()}
        )

    def eq(self, other):
        r = self.ring
        keys = set(self.terms) | set(other.terms)
        z = r.zero
        return all(r.eq(self.terms.get(e, z), other.terms.get(e, z)) for e in keys)

    def is_zero(self):
        return not self.terms

    def coefficient(self, e):
        return self.terms.get(tuple(e), self.ring.zero)

    def partial(self, i):
        r = self.ring
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = r.mul(r.from_int(e[i]), c)
        return TruncatedMultiSeries(r, self.nvars, max(self.trunc - 1, 0), out)

    def subst_univariate(self, series_per_var):
        """Substitute univariate truncated series (in a common new variable) for each variable."""
        r = self.ring
        D = self.trunc
        out = TruncatedSeries.zero(r, D)
        pows = []
        for f in series_per_var:
            p = [TruncatedSeries.one(r, D)]
            for _ in range(D):
                p.append(p[-1] * f)
            pows.append(p)
        for e, c in self.terms.items():
            t = TruncatedSeries(r, [c], D)
            for i, ei in enumerate(e):
                if ei:
                    t = t * pows[i][ei]
            out = out + t
        return out

    def subst_multi(self, inners):
        """Substitute a multiseries for each variable (all with zero constant term ok)."""
        r = self.ring
        D = self.trunc
        maxdeg = [0] * self.nvars
        for e in self.terms:
            for i, ei in enumerate(e):
                maxdeg[i] = max(maxdeg[i], ei)
        pows = []
        for i, f in enumerate(inners):
            p = [TruncatedMultiSeries.constant(r, self.nvars, D, r.one)]
            for _ in range(maxdeg[i]):
                p.append(p[-1] * f)
            pows.append(p)
        acc = TruncatedMultiSeries.zero(r, self.nvars, D)
        for e, c in self.terms.items():
            t = TruncatedMultiSeries.constant(r, self.nvars, D, c)
            for i, ei in enumerate(e):
                if ei:
                    t = t * pows[i][ei]
            acc = acc + t
        return acc

    def compose_univariate_outer(self, g):
        """g(self) for univariate g and self with zero constant term (Horner)."""
        r = self.ring
        if not r.is_zero(self.coefficient((0,) * self.nvars)):
            raise CompositionError("inner multiseries must have zero constant term")
        D = self.trunc
        acc = TruncatedMultiSeries.constant(r, self.nvars, D, g.coeffs[g.trunc])
        for k in range(g.trunc - 1, -1, -1):
            acc = acc * self + TruncatedMultiSeries.constant(r, self.nvars, D, g.coeffs[k])
        return acc

    def eval_at_zero(self, i):
        """Slice setting variable i to 0 (keeps nvars, variable i unused)."""
        out = {e: c for e, c in self.terms.items() if e[i] == 0}
        return TruncatedMultiSeries(self.ring, self.nvars, self.trunc, out)

    def to_univariate(self, i):
        """Collapse to a univariate series in variable i; others must be absent."""
        D = self.trunc
        coeffs = [self.ring.zero] * (D + 1)
        for e, c in self.terms.items():
            assert all(x == 0 for j, x in enumerate(e) if j != i)
            coeffs[e[i]] = c
        return TruncatedSeries(self.ring, coeffs, D)

    def lift_univariate(self, f, i):
        """Embed a univariate series as a multiseries in variable i."""
        out = {}
        for k, c in enumerate(f.coeffs):
            if not f.ring.is_zero(c):
                e = [0] * self.nvars
                e[i] = k
                out[tuple(e)] = c
        return TruncatedMultiSeries(self.ring, self.nvars, min(self.trunc, f.trunc), out)


class LaurentPoly:
    """Finite Laurent polynomial over Q: exponent -> coefficient, no stored zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        for e, v in (coeffs or {}).items():
            v = Fraction(v)
            if v:
                c[int(e)] = v
        self.coeffs = c

    @classmethod
    def monomial(cls, e, c=1):
        return cls({e: c})

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPoly(0)"
        parts = [f"{v}*T^{e}" for e, v in sorted(self.coeffs.items())]
        return "LaurentPoly(" + " + ".join(parts) + ")"

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, v in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + v
        return LaurentPoly(out)

    def __sub__(self, other):
        out = dict(self.coeffs)
        for e, v in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) - v
        return LaurentPoly(out)

    def __neg__(self):
        return LaurentPoly({e: -v for e, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            out = {}
            for e1, v1 in self.coeffs.items():
                for e2, v2 in other.coeffs.items():
                    e = e1 + e2
                    out[e] = out.get(e, Fraction(0)) + v1 * v2
            return LaurentPoly(out)
        return LaurentPoly({e: v * Fraction(other) for e, v in self.coeffs.items()})

    __rmul__ = __mul__

    def is_zero(self):
        return not self.coeffs

    def get(self, e):
        return self.coeffs.get(e, Fraction(0))

    def substitute_power(self, q):
        """T -> T^q."""
        return LaurentPoly({e * q: v for e, v in self.coeffs.items()})

    def derivative(self):
        """Formal d/dT."""
        return LaurentPoly({e - 1: e * v for e, v in self.coeffs.items() if e})

    def dlog_free_primitive(self):
        """Termwise primitive; requires no T^(-1) term."""
        assert -1 not in self.coeffs
        return LaurentPoly({e + 1: v / (e + 1) for e, v in self.coeffs.items()})
