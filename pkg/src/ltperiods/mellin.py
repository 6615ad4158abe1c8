"""Stable and admissible disc functions and the local Mellin transform.

A disc function phi is stable when its translates over the [p]-kernel sum to
zero; stable functions are the Amice transforms of measures supported on the
units.  The Mellin transform evaluated at the weight character t -> t^k is
Theta^k phi, computed here along two independent routes (the two-variable
pullback route and the iterated-derivation route) whose agreement is the
executable content of the interpolation lemma.  Evaluation at weight -1 is
the unique stable Theta-primitive.  Character twists of conductor p^n are
finite sums over p^(-n)-torsion translates against psi-weights; for an
n-admissible function every twist of conductor up to p^n leaves the
transform unchanged.

Everything involving torsion points runs in exact quotient-ring arithmetic.
Stability sums work on any model whose [p]-kernel is exactly enumerable
(multiplicative, or two-term Frobenius polynomials); admissibility and
character twists additionally need the multiplicative F = Q_p model, where
the comparison homomorphism to the formal torus is the identity (for any
other model it carries the non-computable Lubin-Tate period).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .cyclotomic import Cyc, get_field
from .domains import PadicDomain, RationalDomain
from .errors import (
    ConductorError,
    ConsistencyError,
    ModelError,
    PrecisionError,
    StabilityError,
)
from .lubin_tate import MULTIPLICATIVE
from .series import TruncatedSeries


class DiscFunction:
    """A truncated function on the Lubin-Tate disc, attached to its group.

    Immutable up to an idempotent memo cache (stability flag, bivariate
    pullback, multiplicative-basis coefficients); safe to share and to map
    over in parallel.
    """

    __slots__ = ("group", "series", "_cache")

    def __init__(self, group, series):
        self.group = group
        self.series = series
        self._cache = {}

    @classmethod
    def from_coeffs(cls, group, coeffs, trunc=None):
        D = group.D if trunc is None else trunc
        return cls(group, TruncatedSeries(group.ring, list(coeffs), D))

    @classmethod
    def dirac(cls, group, u, trunc=None):
        """(1+S)^u: the Amice transform of the Dirac mass at u (multiplicative model)."""
        if group.model != MULTIPLICATIVE:
            raise ModelError("Dirac functions need the multiplicative model")
        D = group.D if trunc is None else trunc
        one = TruncatedSeries.one(group.ring, D)
        return cls(group, group.endo(u).retrunc(D) + one)

    @property
    def trunc(self):
        return self.series.trunc

    def eq(self, other, upto=None):
        s = other.series if isinstance(other, DiscFunction) else other
        return self.series.eq(s, upto=upto)

    def __add__(self, other):
        return DiscFunction(self.group, self.series + other.series)

    def __sub__(self, other):
        return DiscFunction(self.group, self.series - other.series)

    def scale(self, c):
        return DiscFunction(self.group, self.series.scale(c))

    def value_at_origin(self):
        return self.series.coeffs[0]

    def __repr__(self):
        return f"DiscFunction({self.series!r})"


class PsiSystem:
    """Compatible primitive p^n-th roots of unity for n <= n_max (level-0 psi)."""

    def __init__(self, p, n_max):
        self.p = p
        self.n_max = n_max

    def root(self, n, c=1):
        """psi(c / p^n) = zeta_{p^n}^c as a Cyc value."""
        if n > self.n_max:
            raise ConductorError(f"level {n} exceeds n_max={self.n_max}")
        if n == 0:
            return Cyc.from_fraction(1)
        return Cyc.root_of_unity(self.p**n, c)

    def verify(self):
        """Exact compatibility: zeta_{p^(n+1)}^p = zeta_{p^n}, psi additive on p^-n Z."""
        for n in range(1, self.n_max):
            if self.root(n + 1) ** self.p != self.root(n):
                return False
        for n in range(1, self.n_max + 1):
            if self.root(n, 1) * self.root(n, self.p**n - 1) != Cyc.from_fraction(1):
                return False
        return True

    def __repr__(self):
        return f"PsiSystem(p={self.p}, n_max={self.n_max})"


def _require_rational(group, what):
    if isinstance(group.ring, PadicDomain):
        raise PrecisionError(f"{what} needs ExactRational coefficients")


def _require_multiplicative(group, what):
    if group.model != MULTIPLICATIVE:
        raise ModelError(f"{what} needs the multiplicative F = Q_p model")


def translate_series(group, series, z, ring):
    """phi(F(S, z)) over an extension ring containing z; exact polynomial identity."""
    lift = _lifter(series.ring, ring)
    D = series.trunc
    if group.model == MULTIPLICATIVE:
        # F(S, z) = z + (1+z) S: Horner against a linear polynomial
        b = ring.add(ring.one, z)
        acc = [lift(series.coeffs[D])] + [ring.zero] * D
        for k in range(D - 1, -1, -1):
            # acc <- acc * (z + b S) + phi_k
            new = [ring.zero] * (D + 1)
            for i in range(D + 1):
                c = acc[i]
                if ring.is_zero(c):
                    continue
                new[i] = ring.add(new[i], ring.mul(c, z))
                if i + 1 <= D:
                    new[i + 1] = ring.add(new[i + 1], ring.mul(c, b))
            new[0] = ring.add(new[0], lift(series.coeffs[k]))
            acc = new
        return TruncatedSeries(ring, acc, D)
    # generic: freeze Y = z in the stored bivariate law, then Horner
    u = _freeze_second_variable(group, z, ring, D)
    acc = TruncatedSeries(ring, [lift(series.coeffs[D])], D)
    for k in range(D - 1, -1, -1):
        acc = acc * u + TruncatedSeries(ring, [lift(series.coeffs[k])], D)
    return acc


def _lifter(src_ring, dst_ring):
    if src_ring is dst_ring or src_ring == dst_ring:
        return lambda c: c
    if isinstance(src_ring, RationalDomain):
        return dst_ring.from_fraction
    raise ModelError("cannot lift coefficients into the torsion ring")


def _freeze_second_variable(group, z, ring, D):
    lift = _lifter(group.ring, ring)
    zpow = [ring.one]
    maxj = max((e[1] for e in group.F.terms), default=0)
    for _ in range(maxj):
        zpow.append(ring.mul(zpow[-1], z))
    coeffs = [ring.zero] * (D + 1)
    for (i, j), c in group.F.terms.items():
        if i <= D:
            coeffs[i] = ring.add(coeffs[i], ring.mul(lift(c), zpow[j]))
    return TruncatedSeries(ring, coeffs, D)


_ROOT_SUM_CACHE = {}


def _root_sum_table(field, order):
    """S_m = sum_{c mod order} zeta_order^(cm) as field elements (field contains zeta_order)."""
    key = (field.M, order)
    if key not in _ROOT_SUM_CACHE:
        step = field.M // order
        table = []
        for m in range(order):
            acc = field.zero
            for c in range(order):
                acc = field.add(acc, field.root(c * m * step))
            table.append(acc)
        _ROOT_SUM_CACHE[key] = table
    return _ROOT_SUM_CACHE[key]


def _dirac_data(phi):
    """Cached multiplicative-basis coefficients (rational) of a disc function."""
    if "dirac" not in phi._cache:
        phi._cache["dirac"] = mult_basis_coefficients(phi)
    return phi._cache["dirac"]


def _back_transform(values, ring, D):
    """T-basis coefficient vector -> S-coordinate series over the given ring."""
    from math import comb

    coeffs = [ring.zero] * (D + 1)
    for u, v in enumerate(values):
        if ring.is_zero(v):
            continue
        for k in range(u + 1):
            coeffs[k] = ring.add(coeffs[k], ring.scalar_mul(Fraction(comb(u, k)), v) if hasattr(ring, "scalar_mul") else ring.mul(ring.from_int(comb(u, k)), v))
    return TruncatedSeries(ring, coeffs, D)


def kernel_translate_sum(phi):
    """Sum of phi over the [p]-kernel translates, in TorsionRing(1) coefficients.

    Multiplicative model: translation by zeta^c - 1 is diagonal on the
    multiplicative basis ((1+S)^u picks up zeta^(cu)), so the kernel sum is
    the root-of-unity sum table applied coefficientwise.  Other models walk
    the kernel points with polynomial Horner substitution.
    """
    group = phi.group
    _require_rational(group, "kernel translation")
    tr = group.torsion_ring(1)
    R = tr.ring
    if group.model == MULTIPLICATIVE and isinstance(phi.series.ring, RationalDomain):
        a = _dirac_data(phi)
        table = _root_sum_table(R, group.p)
        vals = [R.scalar_mul(a[u], table[u % group.p]) for u in range(len(a))]
        return _back_transform(vals, R, phi.trunc), tr
    total = None
    for z in tr.kernel_of_p():
        t = translate_series(group, phi.series, z, R)
        total = t if total is None else total + t
    return total, tr


def is_stable(phi):
    """(stable?, witness): witness is the kernel-translate sum, descended if rational."""
    if "stable" in phi._cache:
        return phi._cache["stable"], phi._cache["witness"]
    total, tr = kernel_translate_sum(phi)
    ok = total.is_zero()
    witness = _descend(total, tr.ring, phi.group.ring) or total
    phi._cache["stable"] = ok
    phi._cache["witness"] = witness
    return ok, witness


def _to_rational(R, c):
    """Chase a quotient-ring element down to a Fraction, or None (nested rings ok)."""
    while hasattr(R, "try_base"):
        c = R.try_base(c)
        if c is None:
            return None
        R = R.base
    return c if isinstance(c, Fraction) else None


def _descend(series, R, base_ring):
    """Series over a quotient ring -> base series if every coefficient is rational."""
    out = []
    for c in series.coeffs:
        if R.is_zero(c):
            out.append(base_ring.zero)
            continue
        v = _to_rational(R, c)
        if v is None:
            return None
        out.append(base_ring.from_fraction(v))
    return TruncatedSeries(base_ring, out, series.trunc)


def stabilize(phi):
    """Projection phi - p^(-1) sum of kernel translates onto the stable subspace."""
    group = phi.group
    _require_rational(group, "stabilize")
    _require_multiplicative(group, "stabilize")
    total, tr = kernel_translate_sum(phi)
    descended = _descend(total, tr.ring, group.ring)
    if descended is None:
        raise ConsistencyError("kernel-translate sum failed to descend to the base ring")
    out = DiscFunction(group, phi.series - descended.div_int(group.p))
    ok, witness = is_stable(out)
    if not ok:
        raise ConsistencyError("stabilize output failed the stability check")
    return out


def is_admissible(phi, n, psi):
    """phi(F(S, nu_+(p^-n))) = psi(p^-n) phi, checked at the generator."""
    group = phi.group
    if n == 0:
        ok, _ = is_stable(phi)
        if not ok:
            raise StabilityError("admissibility is defined for stable functions")
        return True
    if n > psi.n_max:
        raise ConductorError(f"depth {n} exceeds the psi system (n_max={psi.n_max})")
    _require_multiplicative(group, "is_admissible")
    ok, _ = is_stable(phi)
    if not ok:
        raise StabilityError("admissibility is defined for stable functions")
    # translation by t_n is diagonal on the multiplicative basis: the
    # generator condition reads zeta^u a_u = zeta a_u for every u
    tr = group.torsion_ring(n)
    R = tr.ring
    a = _dirac_data(phi)
    pn = group.p**n
    zeta = tr.psi_value(1)
    for u, c in enumerate(a):
        if c == 0:
            continue
        if not R.eq(R.scalar_mul(c, R.root(u % pn)), R.scalar_mul(c, zeta)):
            return False
    return True


def theta_power(phi, k):
    s = phi.series
    for _ in range(k):
        s = phi.group.theta(s)
    return DiscFunction(phi.group, s)


def mellin_at_weight(phi, k):
    """M_loc(phi)(<k>) by two routes; returns the common value to degree D - k.

    Route A pulls phi back along the group law, applies Theta in the second
    variable k times, and restricts to the diagonal origin; route B iterates
    Theta directly.  Disagreement is an internal consistency failure.
    """
    group = phi.group
    ok, _w = _stability_gate(phi)
    if not ok:
        raise StabilityError("mellin_at_weight is defined for stable functions")
    route_b = theta_power(phi, k)
    if "bivar" not in phi._cache:
        phi._cache["bivar"] = group.compose_with_F(phi.series)
    m = phi._cache["bivar"]
    for _ in range(k):
        m = group.theta_bivariate_y(m)
    route_a = m.eval_at_zero(1).to_univariate(0).retrunc(max(phi.trunc - k, 0))
    window = phi.trunc - k
    if not route_a.eq(route_b.series, upto=window):
        raise ConsistencyError("Mellin routes disagree inside the valid degree window")
    return DiscFunction(group, route_b.series)


def _stability_gate(phi):
    """Stability check that works in both coefficient modes.

    Fixed-modulus groups cannot build torsion rings, so there the gate uses
    the T-coordinate support criterion (multiplicative model): stable iff
    every multiplicative-basis coefficient with p | u vanishes.
    """
    group = phi.group
    if isinstance(group.ring, PadicDomain):
        _require_multiplicative(group, "stability over fixed-modulus coefficients")
        a = mult_basis_coefficients(phi)
        r = group.ring
        ok = all(r.is_zero(a[u]) for u in range(0, len(a), group.p))
        return ok, None
    return is_stable(phi)


def mult_basis_coefficients(phi):
    """Coefficients a_u with phi(S) = sum_u a_u (1+S)^u (multiplicative model).

    Exact unit-triangular change of basis; works over any coefficient ring.
    """
    _require_multiplicative(phi.group, "multiplicative basis")
    r = phi.series.ring
    D = phi.trunc
    from math import comb

    a = list(phi.series.coeffs)
    # c_k = sum_{u >= k} C(u, k) a_u; solve by back-substitution from u = D
    out = [r.zero] * (D + 1)
    work = list(a)
    for u in range(D, -1, -1):
        out[u] = work[u]
        if not r.is_zero(out[u]):
            for k in range(u):
                work[k] = r.sub(work[k], r.mul(r.from_int(comb(u, k)), out[u]))
    return out


def from_mult_basis(group, a, trunc=None):
    """Inverse of mult_basis_coefficients: build sum a_u (1+S)^u."""
    from math import comb

    r = group.ring
    D = group.D if trunc is None else trunc
    coeffs = [r.zero] * (D + 1)
    for u, c in enumerate(a):
        if not r.is_zero(c):
            for k in range(min(u, D) + 1):
                coeffs[k] = r.add(coeffs[k], r.mul(c, r.from_int(comb(u, k))))
    return DiscFunction(group, TruncatedSeries(r, coeffs, D))


def stable_primitive(phi):
    """The unique stable g with Theta g = phi; the weight -1 Mellin value.

    Integrate phi * lambda' termwise, then subtract p^(-1) times the
    (constant) kernel-translate sum, which is the unique stabilizing shift.
    """
    group = phi.group
    _require_rational(group, "stable_primitive")
    _require_multiplicative(group, "stable_primitive")
    ok, witness = is_stable(phi)
    if not ok:
        raise StabilityError("no stable primitive exists: input is not stable")
    r = group.ring
    D = phi.trunc
    one_plus = TruncatedSeries(r, [1, 1], D)
    g_prime = phi.series * one_plus.inverse()  # phi * lambda' on the multiplicative model
    g_part = DiscFunction(group, g_prime.antiderivative(trunc=D + 1))
    total, tr = kernel_translate_sum(g_part)
    for k in range(1, total.trunc + 1):
        if not tr.ring.is_zero(total.coeffs[k]):
            raise ConsistencyError("kernel sum of a primitive must be constant")
    c0 = tr.ring.try_base(total.coeffs[0])
    if c0 is None:
        raise ConsistencyError("primitive kernel constant failed to descend")
    shift = TruncatedSeries(r, [Fraction(c0) / group.p], D + 1)
    g = DiscFunction(group, g_part.series - shift)
    if not group.theta(g.series).eq(phi.series, upto=D):
        raise ConsistencyError("Theta of the stable primitive does not return the input")
    ok2, _ = is_stable(g)
    if not ok2:
        raise ConsistencyError("stable primitive is not stable")
    return g


def mellin_at_character(phi, chi, k, psi, strategy="auto"):
    """M_loc(phi)(chi <k>): the conductor-p^n character twist of Theta^k phi.

    p^(-n) sum_x [sum_u chi(u) psi(-xu)] (Theta^k phi)(F(X, nu_+(x))) over
    x in p^(-n) Z / Z.  For an n-admissible phi the twist collapses to
    mellin_at_weight(phi, k) with coefficients in the base ring.

    Two evaluation strategies compute the same double sum: "horner"
    substitutes each torsion translate literally; "tbasis" regroups through
    the multiplicative basis, where translation is diagonal and the inner
    psi-sums become root-of-unity orthogonality sums.  "auto" picks tbasis.
    """
    group = phi.group
    _require_rational(group, "mellin_at_character")
    ok, _w = is_stable(phi)
    if not ok:
        raise StabilityError("mellin_at_character is defined for stable functions")
    n = chi.conductor
    if n == 0:
        return mellin_at_weight(phi, k)
    if n > psi.n_max:
        raise ConductorError(f"conductor exponent {n} exceeds psi (n_max={psi.n_max})")
    _require_multiplicative(group, "mellin_at_character")
    p = group.p
    pn = p**n
    if strategy not in ("auto", "tbasis", "horner"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "horner":
        return _character_twist_horner(phi, chi, k, pn)
    # tbasis: on (1+S)^u the double sum collapses to
    # p^(-n) sum_v chi(v) S_{u-v} with S_m = sum_c zeta^(cm)
    th = theta_power(phi, k)
    a = mult_basis_coefficients(th)
    field_pn = get_field(pn)
    table = _root_sum_table(field_pn, pn)
    units = [v for v in range(1, pn) if v % p]
    chi_vals = {v: chi.value(v) for v in units}
    weight_by_residue = []
    for m in range(pn):
        w = None
        for v in units:
            term = chi_vals[v] * Cyc(field_pn, table[(m - v) % pn])
            w = term if w is None else w + term
        weight_by_residue.append(w * Fraction(1, pn))
    values = [weight_by_residue[u % pn] * Fraction(a[u]) for u in range(len(a))]
    if all(v.is_rational for v in values):
        vals = [v.as_fraction() for v in values]
        return DiscFunction(group, _back_transform(vals, group.ring, th.series.trunc))
    L = 1
    for v in values:
        L = L * v.field.M // gcd(L, v.field.M)
    field = get_field(L)
    lifted = [field.lift_from(v.field, v.coeffs) for v in values]
    return DiscFunction(group, _back_transform_field(lifted, field, th.series.trunc))


def _back_transform_field(values, field, D):
    from math import comb

    coeffs = [field.zero] * (D + 1)
    for u, v in enumerate(values):
        if field.is_zero(v):
            continue
        for k in range(u + 1):
            coeffs[k] = field.add(coeffs[k], field.scalar_mul(Fraction(comb(u, k)), v))
    return TruncatedSeries(field, coeffs, D)


def _character_twist_horner(phi, chi, k, pn):
    """Literal translate-sum evaluation of the character twist."""
    group = phi.group
    p = group.p
    L = pn * chi.M // gcd(pn, chi.M)
    field = get_field(L)
    step = L // pn
    th = theta_power(phi, k).series
    window = th.trunc
    units = [u for u in range(1, pn) if u % p]
    chi_lift = {u: field.lift_from(get_field(chi.M), chi.value(u).coeffs) for u in units}
    acc = TruncatedSeries.zero(field, window)
    for c in range(pn):
        # Gauss weight sum_u chi(u) psi(-cu)
        g = field.zero
        for u in units:
            g = field.add(g, field.mul(chi_lift[u], field.root((-c * u) % pn * step)))
        if field.is_zero(g):
            continue
        z = field.sub(field.root(c * step), field.one)
        t = translate_series(group, th, z, field)
        acc = acc + TruncatedSeries(field, [field.mul(g, x) for x in t.coeffs], window)
    acc = TruncatedSeries(
        field, [field.scalar_mul(Fraction(1, pn), x) for x in acc.coeffs], window
    )
    descended = _descend(acc, field, group.ring)
    if descended is not None:
        return DiscFunction(group, descended)
    return DiscFunction(group, acc)
