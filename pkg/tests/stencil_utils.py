"""Shared helpers: expected interior-row stencils of the coupled 2D system,
expressed through the named polynomials, for exact comparison against the
assembled rows. Unit spacing and mu = 1 throughout (so mu*sigma = 2*Pe/u)."""
from fractions import Fraction

from eddyfem.core import Scheme
from eddyfem.ztransfer import polys_2d


def poly_stencil(poly, scale):
    """{(zn_exp, zm_exp): scale * coeff} with zero entries dropped."""
    return {k: scale * v for k, v in poly.coeffs.items() if scale * v != 0}


def merged(poly_a, scale_a, poly_b, scale_b):
    out = {}
    for poly, scale in ((poly_a, scale_a), (poly_b, scale_b)):
        for k, v in poly.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + scale * v
    return {k: v for k, v in out.items() if v != 0}


def expected_lhs_stencils(pe: Fraction, u: Fraction):
    """Map (row_field, col_field) -> expected stencil dict; fields are
    0 = phi, 1 = A_y, 2 = A_z."""
    p = polys_2d()
    third = Fraction(1, 3)
    return {
        (2, 0): poly_stencil(p["Q2"], pe / (6 * u)),
        (2, 2): poly_stencil(p["S1"], -third),
        (1, 0): poly_stencil(p["Q1"], pe / (6 * u)),
        (1, 1): merged(p["S1"], -third, p["Q2"], pe / 6),
        (1, 2): poly_stencil(p["Q1"], -pe / 6),
        (0, 0): poly_stencil(p["S1"], third),
        (0, 1): poly_stencil(p["S2"], u / 4),
        (0, 2): poly_stencil(p["S3"], -u / 6),
    }


def expected_rhs_stencils(pe: Fraction, u: Fraction, scheme: Scheme):
    """Map row_field -> expected input-weight stencil (unit spacing)."""
    p = polys_2d()
    if scheme is Scheme.GALERKIN:
        return {1: poly_stencil(p["M1"], pe / 18), 0: poly_stencil(p["Q1"], u / 12)}
    return {1: poly_stencil(p["N1"], pe / 8), 0: poly_stencil(p["R1"], u / 8)}
