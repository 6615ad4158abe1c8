"""Exact coefficient domains: rationals and fixed-modulus p-adics.

Every ring used by the kernel speaks the same small protocol: ``zero``,
``one``, ``add``, ``sub``, ``neg``, ``mul``, ``eq``, ``is_zero``,
``from_int``, ``from_fraction``, ``inv``, ``div``, ``div_int`` and
``coerce``.  Series and quotient rings are generic over it.

RationalDomain elements are plain ``fractions.Fraction``.  PadicDomain
elements are pairs ``(value, prec)`` meaning "value mod p^prec" with
0 <= prec <= N; full-precision elements have prec = N.  Precision is
per-element, never ambient.  Division is restricted to units: dividing by p
raises PrecisionError (fixed-modulus mode has no 1/p).  The only way to
lower a power of p is ``shift_down``, which requires exact divisibility and
records the loss in the element's precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidUnitError, PrecisionError


@dataclass(frozen=True)
class RationalDomain:
    """Exact rational coefficients (mode "rational")."""

    mode = "rational"

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def from_fraction(self, q):
        return Fraction(q)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into RationalDomain")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by 0")
        return a / b

    def div_int(self, a, n):
        return a / n

    def eq(self, a, b):
        return a == b

    def is_zero(self, a):
        return a == 0

    def repr_elem(self, a):
        return str(a)


@dataclass(frozen=True)
class PadicDomain:
    """Residues mod p^N with a tracked per-element precision exponent."""

    p: int
    N: int

    mode = "padic"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("precision N must be >= 1")

    def _make(self, v, k):
        assert 0 <= k <= self.N
        return (v % self.p**k if k else 0, k)

    @property
    def zero(self):
        return (0, self.N)

    @property
    def one(self):
        return (1, self.N)

    def from_int(self, n):
        return (n % self.p**self.N, self.N)

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise PrecisionError(
                f"{q} has p in the denominator; not representable mod {self.p}^{self.N}"
            )
        m = self.p**self.N
        return (q.numerator * pow(q.denominator, -1, m) % m, self.N)

    def coerce(self, x):
        if isinstance(x, tuple):
            return x
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def add(self, a, b):
        k = min(a[1], b[1])
        return self._make(a[0] + b[0], k)

    def sub(self, a, b):
        k = min(a[1], b[1])
        return self._make(a[0] - b[0], k)

    def neg(self, a):
        return self._make(-a[0], a[1])

    def mul(self, a, b):
        k = min(a[1], b[1])
        return self._make(a[0] * b[0], k)

    def inv(self, a):
        v, k = a
        if v % self.p == 0:
            raise PrecisionError(f"{v} mod {self.p}^{k} is not a unit")
        return (pow(v, -1, self.p**k), k)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def div_int(self, a, n):
        if n % self.p == 0:
            raise PrecisionError(f"division by {n} needs 1/{self.p}")
        v, k = a
        return self._make(v * pow(n, -1, self.p**k), k) if k else a

    def shift_down(self, a, j):
        """Exact division by p^j; the quotient is known to j fewer digits."""
        v, k = a
        if j == 0:
            return a
        if k <= j:
            raise PrecisionError(f"shift_down({j}) exhausts precision {k}")
        if v % self.p**j != 0:
            raise PrecisionError(f"{v} is not divisible by {self.p}^{j}")
        return (v // self.p**j % self.p ** (k - j), k - j)

    def eq(self, a, b):
        k = min(a[1], b[1])
        m = self.p**k
        return (a[0] - b[0]) % m == 0

    def is_zero(self, a):
        return a[0] % self.p ** a[1] == 0

    def valuation(self, a):
        """p-adic valuation, or None for an element indistinguishable from 0."""
        v, k = a
        if v % self.p**k == 0:
            return None
        j = 0
        while v % self.p == 0:
            v //= self.p
            j += 1
        return j

    def reduce_fraction(self, q):
        """Image of an exact rational with unit denominator; alias of from_fraction."""
        return self.from_fraction(q)

    def repr_elem(self, a):
        v, k = a
        return str(v) if k == self.N else f"{v}@{k}"


def teichmuller(u, domain):
    """Teichmuller lift: the unique x = u mod p with x^p = x mod p^N.

    Iterating x -> x^p gains one digit of agreement with the fixed point per
    step, so N iterations suffice.
    """
    if not isinstance(domain, PadicDomain):
        raise InvalidUnitError("teichmuller is defined on FixedModulus domains")
    p, N = domain.p, domain.N
    if u % p == 0:
        raise InvalidUnitError(f"{u} is divisible by {p}")
    m = p**N
    x = u % m
    for _ in range(N):
        x = pow(x, p, m)
    return (x, N)
