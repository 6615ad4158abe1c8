"""Characters of (Z/p^n)^x and of finite abelian groups, with exact values.

A UnitCharacter stores its full value table as exponents of a root of unity
zeta_M where M is the group exponent at the stored conductor; values come
out as Cyc elements so they mix with Gauss sums and rational constants.
Conductors are always minimal: the constructor recomputes the level at which
the character actually lives.
"""

from __future__ import annotations

from math import gcd

from .cyclotomic import Cyc
from .errors import ConductorError


def _unit_group_structure(p, n):
    """Generators and their orders for (Z/p^n)^x."""
    m = p**n
    if n == 0 or m <= 2:
        return [], []
    if p == 2:
        if n == 2:
            return [3], [2]
        # n >= 3: <-1> x <5>
        return [m - 1, 5], [2, 2 ** (n - 2)]
    g = _primitive_root(p)
    # a primitive root mod p^2 stays primitive mod all p^n
    if pow(g, p - 1, p * p) == 1:
        g += p
    return [g % m], [(p - 1) * p ** (n - 1)]


def _primitive_root(p):
    order = p - 1
    fac = _prime_factors(order)
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in fac):
            return g
    raise ValueError(f"no primitive root mod {p}")


def _prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


class UnitCharacter:
    """Character of (Z/p^n)^x with values in roots of unity; conductor minimal."""

    def __init__(self, p, n, exponents, order_hint=None):
        """exponents: u -> e with chi(u) = zeta_M^e, for every unit u mod p^n.

        M defaults to the exponent of the value group actually used.
        """
        self.p = p
        m = p**n
        if n == 0:
            self.n = 0
            self.M = 1
            self._table = {1: 0}
            return
        M = order_hint or _value_order(exponents)
        table = {u % m: e % M for u, e in exponents.items()}
        n_min, table, M = _minimize(p, n, table, M)
        self.n = n_min
        self.M = M
        self._table = table

    # -- constructors -------------------------------------------------------

    @classmethod
    def trivial(cls, p):
        return cls(p, 0, {1: 0})

    @classmethod
    def from_generator_exponents(cls, p, n, gen_exps):
        """Character sending generator g_i to zeta_M^(gen_exps_i), M = group exponent."""
        gens, orders = _unit_group_structure(p, n)
        if not gens:
            return cls.trivial(p)
        M = 1
        for o in orders:
            M = M * o // gcd(M, o)
        m = p**n
        table = {}
        for exps in _iter_group(orders):
            u = 1
            e = 0
            for g, o, x, a in zip(gens, orders, exps, gen_exps):
                u = u * pow(g, x, m) % m
                e = (e + x * a * (M // o)) % M
            table[u] = e
        return cls(p, n, table, order_hint=M)

    @classmethod
    def quadratic(cls, p):
        """The Legendre character mod an odd prime p."""
        assert p > 2
        table = {u: (0 if pow(u, (p - 1) // 2, p) == 1 else 1) for u in range(1, p)}
        return cls(p, 1, table, order_hint=2)

    @classmethod
    def all_characters(cls, p, n, conductor_exactly=None):
        """Every character of (Z/p^n)^x, optionally filtered by exact conductor."""
        gens, orders = _unit_group_structure(p, n)
        out = []
        if not gens:
            out.append(cls.trivial(p))
        else:
            for exps in _iter_group(orders):
                out.append(cls.from_generator_exponents(p, n, exps))
        if conductor_exactly is not None:
            out = [c for c in out if c.n == conductor_exactly]
        return out

    # -- queries -------------------------------------------------------------

    @property
    def conductor(self):
        return self.n

    @property
    def modulus(self):
        return self.p**self.n

    @property
    def order(self):
        if self.n == 0:
            return 1
        e = 1
        for v in self._table.values():
            o = self.M // gcd(self.M, v) if v else 1
            e = e * o // gcd(e, o)
        return e

    def exponent_at(self, u):
        if self.n == 0:
            return 0
        u = u % self.modulus
        if u not in self._table:
            raise ConductorError(f"{u} is not a unit mod {self.modulus}")
        return self._table[u]

    def value(self, u):
        """chi(u) as a Cyc element."""
        return Cyc.root_of_unity(self.M, self.exponent_at(u)) if self.M > 1 else Cyc.from_fraction(1)

    def value_at_minus_one(self):
        return self.value(-1)

    def is_trivial(self):
        return self.n == 0

    def inverse(self):
        if self.n == 0:
            return self
        return UnitCharacter(
            self.p, self.n, {u: (-e) % self.M for u, e in self._table.items()}, self.M
        )

    def __mul__(self, other):
        assert self.p == other.p
        n = max(self.n, other.n)
        if n == 0:
            return UnitCharacter.trivial(self.p)
        M = self.M * other.M // gcd(self.M, other.M)
        m = self.p**n
        table = {}
        for u in range(1, m):
            if u % self.p == 0:
                continue
            e = (self.exponent_at(u) * (M // self.M) + other.exponent_at(u) * (M // other.M)) % M
            table[u] = e
        return UnitCharacter(self.p, n, table, order_hint=M)

    def __eq__(self, other):
        if not isinstance(other, UnitCharacter):
            return NotImplemented
        if (self.p, self.n) != (other.p, other.n):
            return False
        return all(self.value(u) == other.value(u) for u in self._table)

    def __hash__(self):
        return hash((self.p, self.n, self.M, tuple(sorted(self._table.items()))))

    def __repr__(self):
        return f"UnitCharacter(p={self.p}, conductor={self.n}, order={self.order})"

    def table_json(self):
        gens, _ = _unit_group_structure(self.p, self.n)
        return {str(g): f"zeta_{self.M}^{self.exponent_at(g)}" for g in gens}


def _value_order(exponents):
    M = 1
    for e in exponents.values():
        if e:
            M = max(M, e + 1)
    return M


def _minimize(p, n, table, M):
    """Reduce to the minimal conductor: the largest quotient the table factors through."""
    while n > 0:
        m = p**n
        m_prev = p ** (n - 1)
        # chi factors mod p^(n-1) iff it is trivial on 1 + p^(n-1) (units = 1 mod p^(n-1))
        units_congruent_1 = [u for u in table if u % m_prev == 1 % m_prev]
        if all(table[u] == 0 for u in units_congruent_1):
            if n == 1:
                return 0, {1: 0}, 1
            new_table = {}
            for u, e in table.items():
                new_table.setdefault(u % m_prev, e)
            table = new_table
            n -= 1
        else:
            break
    if n == 0:
        return 0, {1: 0}, 1
    # shrink the value modulus to the order actually used
    g = 0
    for e in table.values():
        g = gcd(g, e)
    g = gcd(g, M)
    if g > 1:
        table = {u: e // g for u, e in table.items()}
        M //= g
    return n, table, M


def _iter_group(orders):
    if not orders:
        yield ()
        return
    head, *rest = orders
    for x in range(head):
        for tail in _iter_group(rest):
            yield (x,) + tail


class FiniteAbelianGroup:
    """prod Z/d_i, elements are exponent tuples; characters are exponent tuples too."""

    def __init__(self, invariants):
        self.invariants = tuple(int(d) for d in invariants)
        assert all(d >= 1 for d in self.invariants)

    @property
    def order(self):
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def elements(self):
        return list(_iter_group(self.invariants))

    def identity(self):
        return (0,) * len(self.invariants)

    def add(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariants))

    def neg(self, a):
        return tuple((-x) % d for x, d in zip(a, self.invariants))

    def characters(self):
        return [FiniteCharacter(self, e) for e in _iter_group(self.invariants)]

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.invariants == other.invariants

    def __hash__(self):
        return hash(self.invariants)

    def __repr__(self):
        return "FiniteAbelianGroup" + repr(self.invariants)


class FiniteCharacter:
    """Character of a FiniteAbelianGroup: x -> prod zeta_{d_i}^(a_i x_i)."""

    def __init__(self, group, exponents):
        self.group = group
        self.exponents = tuple(int(e) % d for e, d in zip(exponents, group.invariants))

    def value(self, x):
        out = Cyc.from_fraction(1)
        for a, xi, d in zip(self.exponents, x, self.group.invariants):
            if d > 1 and a * xi % d:
                out = out * Cyc.root_of_unity(d, a * xi)
        return out

    def is_trivial(self):
        return all(e == 0 for e in self.exponents)

    def inverse(self):
        return FiniteCharacter(self.group, [-e for e in self.exponents])

    def __mul__(self, other):
        assert self.group == other.group
        return FiniteCharacter(
            self.group, [a + b for a, b in zip(self.exponents, other.exponents)]
        )

    def __eq__(self, other):
        if not isinstance(other, FiniteCharacter):
            return NotImplemented
        return self.group == other.group and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.group, self.exponents))

    def __repr__(self):
        return f"FiniteCharacter{self.exponents}"
