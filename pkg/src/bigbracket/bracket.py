"""The canonical even graded Poisson bracket on C^inf(T*PiA).

Generator table, fixed once for the whole library:

    {p_i, x^j} = delta_i^j        {th_a, xi^b} = delta_a^b

all other generator brackets vanish.  The bracket extends as a graded
biderivation: bilinear, graded antisymmetric
{f,g} = -(-1)^{|f||g|} {g,f}, and Leibniz in the second slot
{f, gh} = {f,g} h + (-1)^{|f||g|} g {f,h}.  On a parity-homogeneous f these
laws force the closed formula implemented here:

    {f,g} = sum_i ( df/dp_i dg/dx^i - df/dx^i dg/dp_i )
          + (-1)^{|f|+1} sum_a ( df/dth_a dg/dxi^a + df/dxi^a dg/dth_a )

with left derivatives on odd symbols.  Every term removes one conjugate
pair, so the bracket drops bidegree by exactly (1,1).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .poly import GradedPoly, Monomial, _acc


def bracket(f: GradedPoly, g: GradedPoly) -> GradedPoly:
    """The big bracket {f, g}; raises on a coordinate-system mismatch."""
    if f.coords != g.coords:
        raise ValueError("coordinate-system mismatch")
    if f.is_zero() or g.is_zero():
        return GradedPoly(f.coords)
    fx, fp, fth, fxi = f.used_indices()
    gx, gp, gth, gxi = g.used_indices()

    out: dict[Monomial, Fraction] = {}

    def add_product(a: GradedPoly, b: GradedPoly, sign: int) -> None:
        prod = a * b
        for mono, coeff in prod.terms():
            _acc(out, mono, coeff if sign > 0 else -coeff)

    # even conjugate pairs: no parity prefactor
    for i in fp & gx:
        add_product(f.d_p(i), g.d_x(i), 1)
    for i in fx & gp:
        add_product(f.d_x(i), g.d_p(i), -1)

    # odd conjugate pairs: prefactor (-1)^{|f|+1} per parity component of f
    f_even, f_odd = f.parity_split()
    for fpart, pref in ((f_even, -1), (f_odd, 1)):
        if fpart.is_zero():
            continue
        pth = fpart.used_indices()[2]
        pxi = fpart.used_indices()[3]
        for a in pth & gxi:
            add_product(fpart.d_theta(a), g.d_xi(a), pref)
        for a in pxi & gth:
            add_product(fpart.d_xi(a), g.d_theta(a), pref)

    return GradedPoly._raw(f.coords, out)


def ad(phi: GradedPoly) -> Callable[[GradedPoly], GradedPoly]:
    """The derivation f -> {phi, f}."""
    def act(f: GradedPoly) -> GradedPoly:
        return bracket(phi, f)
    return act


TWIST_BIDEGREES = ((0, 2), (2, 0))


def twist_exp(phi: GradedPoly, f: GradedPoly) -> GradedPoly:
    """Exponential twist of f by a 2-form or bivector generator phi.

    Computes sum_k (1/k!) {phi, .}^k (f).  Bracketing with a (0,2) generator
    lowers eps by one and with a (2,0) generator lowers delta by one, so the
    series terminates after at most eps(f)+1 resp. delta(f)+1 applications.
    The orientation of the exponent is calibrated so that for a Poisson pi
    and 2-form omega the twisted hamiltonian twist_exp(omega, {pi, mu})
    equals {pi + N, mu + H} + psi with N = {omega, pi}, H = {omega, mu},
    psi = (1/2){mu, {N, omega}}.
    """
    bd = phi.bidegree()
    if phi.is_zero() or bd is None or tuple(bd) not in TWIST_BIDEGREES:
        raise ValueError("twist generator must be bihomogeneous of bidegree (0,2) or (2,0)")
    bound = (f.max_eps() if tuple(bd) == (0, 2) else f.max_delta()) + 1
    result = f
    term = f
    k = 0
    while not term.is_zero():
        k += 1
        if k > bound:
            raise AssertionError("twist series failed to terminate within the bidegree bound")
        term = bracket(phi, term).scale(Fraction(1, k))
        result = result + term
    return result
