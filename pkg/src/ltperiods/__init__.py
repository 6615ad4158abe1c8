"""Exact p-adic kernels around Lubin-Tate formal groups.

Modules: domains (rational / fixed-modulus coefficients), cyclotomic
(torsion-value rings), series (truncated and Laurent arithmetic), lubin_tate
(group laws, logarithms, Theta, torsion rings), mellin (stable functions and
the local Mellin transform), local_factors (L, Gauss, epsilon), wald_local
(zeta integrals, torus periods, the Q-distribution, Saito-Tunnell),
global_toy (finite-level anticyclotomic distributions and universal torus
periods), coleman (Frobenius-proper primitives on the rigid torus).
"""

from .domains import PadicDomain, RationalDomain, teichmuller
from .lubin_tate import lt_construct, multiplicative_group, st_derivation, theta
from .mellin import (
    DiscFunction,
    PsiSystem,
    is_admissible,
    is_stable,
    mellin_at_character,
    mellin_at_weight,
    stabilize,
    stable_primitive,
)

__all__ = [
    "PadicDomain",
    "RationalDomain",
    "teichmuller",
    "lt_construct",
    "multiplicative_group",
    "st_derivation",
    "theta",
    "DiscFunction",
    "PsiSystem",
    "is_admissible",
    "is_stable",
    "mellin_at_character",
    "mellin_at_weight",
    "stabilize",
    "stable_primitive",
]

__version__ = "0.1.0"
