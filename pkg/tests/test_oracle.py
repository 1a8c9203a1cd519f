import numpy as np
import pytest

from eddyfem.core import Scheme
from eddyfem.fem1d import assemble_1d, input_weights, rect_pulse_case, solve_1d
from eddyfem.oracle import (OutOfValidityError, analytic_solve, error_extremum,
                            growth_ratio, peak_error, peak_error_from_solution)

FIG8_CASES = [
    (Scheme.GALERKIN, 200.0, 0.20, 38, 12, 38),
    (Scheme.ELEMENT_AVERAGED, 2.0, 0.25, 30, 9, 30),
    (Scheme.ELEMENT_AVERAGED, 400.0, 0.17, 46, 15, 46),
]


def weighted_input(sol, scheme):
    """Three-node weighted nodal input of the rectangular pulse."""
    n = sol.node_count
    lo, hi = sol.pulse_node_range()
    bn = np.zeros(n)
    bn[lo:hi + 1] = sol.params.amplitude
    w = input_weights(scheme)
    bt = np.zeros(n)
    bt[1:-1] = w[0] * bn[:-2] + w[1] * bn[1:-1] + w[2] * bn[2:]
    return bt


@pytest.mark.parametrize("scheme,pe,dz,m_b,m_c,m_d", FIG8_CASES)
def test_difference_equation_residual(scheme, pe, dz, m_b, m_c, m_d):
    sol = analytic_solve(pe, dz, 1.0, m_b, m_c, m_d, scheme)
    y = sol.nodal_values()
    bt = weighted_input(sol, scheme)
    lam = sol.params.lam
    r = np.empty(len(y) - 2)
    for n in range(1, len(y) - 1):
        lhs = (-1 - pe) * y[n - 1] + 2 * y[n] + (-1 + pe) * y[n + 1]
        r[n - 1] = lhs - 2 * pe * dz * bt[n]
    assert np.max(np.abs(r)) <= 1e-9 * abs(lam)


def test_residual_holds_for_both_schemes_generic_config():
    for scheme in Scheme:
        sol = analytic_solve(7.5, 0.3, 2.0, 20, 11, 25, scheme)
        y = sol.nodal_values()
        bt = weighted_input(sol, scheme)
        res = [(-1 - 7.5) * y[n - 1] + 2 * y[n] + (-1 + 7.5) * y[n + 1]
               - 2 * 7.5 * 0.3 * bt[n] for n in range(1, len(y) - 1)]
        assert np.max(np.abs(res)) <= 1e-9 * sol.params.lam


@pytest.mark.parametrize("scheme,pe,dz,m_b,m_c,m_d", FIG8_CASES)
def test_matches_fem_solution(scheme, pe, dz, m_b, m_c, m_d):
    sol = analytic_solve(pe, dz, 1.0, m_b, m_c, m_d, scheme)
    mesh, material, profile = rect_pulse_case(pe, dz, m_b, m_c, m_d)
    fem = solve_1d(assemble_1d(mesh, material, profile, scheme))
    y = sol.nodal_values()
    assert len(fem.a_y) == len(y)
    assert np.max(np.abs(fem.a_y - y)) <= 1e-8 * np.max(np.abs(y))


def test_boundary_conditions_of_closed_form():
    sol = analytic_solve(5.0, 0.2, 1.0, 15, 9, 18, Scheme.GALERKIN)
    assert sol.y_b(0) == pytest.approx(0.0, abs=1e-14)
    # downstream run is constant: zero-gradient outlet condition
    assert sol.y_d(sol.params.m_d) == sol.y_d(sol.params.m_d + 1)
    assert sol.constants["d2"] == 0.0
    assert sol.constants["b1"] == -sol.constants["b2"]


def test_continuity_at_junctions():
    sol = analytic_solve(3.0, 0.25, 1.0, 12, 8, 14, Scheme.ELEMENT_AVERAGED)
    p = sol.params
    assert sol.y_b(p.m_b) == pytest.approx(sol.y_f(0), rel=1e-12)
    assert sol.y_f(3) == pytest.approx(sol.y_c(0), rel=1e-12)
    assert sol.y_c(p.m_c) == pytest.approx(sol.y_g(0), rel=1e-12)
    assert sol.y_g(3) == pytest.approx(sol.y_d(0), rel=1e-12)


def test_rejects_low_peclet():
    with pytest.raises(OutOfValidityError):
        analytic_solve(1.0, 0.2, 1.0, 10, 8, 10, Scheme.GALERKIN)
    with pytest.raises(OutOfValidityError):
        analytic_solve(0.5, 0.2, 1.0, 10, 8, 10, Scheme.GALERKIN)


def test_peak_error_closed_forms():
    B = 1.0
    assert peak_error(Scheme.ELEMENT_AVERAGED, 2.0, B) == pytest.approx(-B / 27, rel=1e-14)
    assert peak_error(Scheme.ELEMENT_AVERAGED, 1.0, B) == 0.0
    assert peak_error(Scheme.GALERKIN, 1e6, B) == pytest.approx(B / 3, rel=1e-5)
    with pytest.raises(OutOfValidityError):
        peak_error(Scheme.GALERKIN, 0.9, B)


def test_peak_error_from_constants_matches_closed_form():
    for pe in (2.0, 10.0, 100.0, 1000.0):
        for scheme in Scheme:
            sol = analytic_solve(pe, 0.2, 1.0, 30, 12, 30, scheme)
            via_constants = peak_error_from_solution(sol)
            closed = peak_error(scheme, pe, 1.0)
            assert via_constants == pytest.approx(closed, rel=1e-9)


def test_error_extremum_averaged_is_at_pe_two():
    pe_star, err = error_extremum(Scheme.ELEMENT_AVERAGED)
    assert pe_star == pytest.approx(2.0, abs=1e-7)
    assert err == pytest.approx(1.0 / 27.0, rel=1e-10)


def test_error_extremum_galerkin_grows_toward_limit():
    pe_star, err = error_extremum(Scheme.GALERKIN, pe_hi=1e4)
    assert pe_star == pytest.approx(1e4, rel=1e-3)   # no interior extremum
    assert err == pytest.approx(1.0 / 3.0, rel=0.01)


def test_error_vanishes_just_above_one():
    for scheme in Scheme:
        assert abs(peak_error(scheme, 1.0 + 1e-9, 1.0)) < 1e-8


def test_stabilization_dominates_asymptotically():
    ratios = [abs(peak_error(Scheme.ELEMENT_AVERAGED, pe, 1.0)
                  / peak_error(Scheme.GALERKIN, pe, 1.0))
              for pe in (10.0, 100.0, 1e4, 1e6)]
    assert ratios == sorted(ratios, reverse=True)
    assert ratios[-1] < 1e-11


def test_anchored_evaluation_survives_long_domains():
    # |r| = 3 at Pe = 2; naive r^n would overflow well before n = 600
    sol = analytic_solve(2.0, 0.1, 1.0, 600, 200, 600, Scheme.ELEMENT_AVERAGED)
    y = sol.nodal_values()
    assert np.all(np.isfinite(y))
    assert growth_ratio(2.0) == -3.0
