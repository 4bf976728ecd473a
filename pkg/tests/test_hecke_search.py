import dataclasses

import pytest

from errors import CertificationError, NoSolutionError
from gf_projective import primes_up_to
from hecke_search import (HeckeParams, build_action, f_poly, primitive_roots, solve_params,
                          theta_oracle, valid_b_values, xy_has_fixed_points)
from embedding import check_januarial

from conftest import D17_X, D17_Y


def _ints(elems):
    return {int(e) for e in elems}


def test_f_poly_coefficients():
    assert f_poly(9).coefficients == (1, -7, 15, -10, 1)
    assert f_poly(3).coefficients == (1, -1)
    assert f_poly(8).coefficients == (1, -6, 10, -4)
    assert f_poly(2).coefficients == (1, 0)
    assert str(f_poly(8)) == "θ^3 - 6θ^2 + 10θ - 4"


@pytest.mark.parametrize("ell", range(3, 30))
def test_f_poly_degree_and_signs(ell):
    poly = f_poly(ell)
    expected = (ell - 1) // 2 if ell % 2 else ell // 2 - 1
    assert poly.degree == expected
    assert poly.coefficients[0] == 1
    assert all(c != 0 and (c > 0) == (j % 2 == 0) for j, c in enumerate(poly.coefficients))


def test_f_poly_rejects_small_ell():
    with pytest.raises(ValueError):
        f_poly(1)


def test_primitive_roots_examples():
    assert _ints(primitive_roots(9, 17)) == {9, 15, 16}
    assert _ints(primitive_roots(3, 5)) == {1}
    assert _ints(primitive_roots(2, 3)) == {0}
    assert _ints(primitive_roots(8, 17)) == {8, 13}


def test_theta_oracle_examples():
    assert _ints(theta_oracle(17, 9)) == {9, 15, 16}
    assert _ints(theta_oracle(17, 2)) == {0}
    assert _ints(theta_oracle(11, 6)) == {3}


def test_theta_oracle_bound():
    with pytest.raises(ValueError):
        theta_oracle(211, 3)


@pytest.mark.parametrize("p", [p for p in primes_up_to(23) if p > 2])
def test_primitive_roots_match_oracle(p):
    for ell in range(2, p + 2):
        assert _ints(primitive_roots(ell, p)) == _ints(theta_oracle(p, ell)), (p, ell)


@pytest.mark.slow
@pytest.mark.parametrize("p", [p for p in primes_up_to(50) if p > 23])
def test_primitive_roots_match_oracle_large(p):
    for ell in range(2, p + 2):
        assert _ints(primitive_roots(ell, p)) == _ints(theta_oracle(p, ell)), (p, ell)


def test_d17_params_are_valid(d17_params):
    assert d17_params.violations() == []
    assert valid_b_values(17, 8) == [5, 8, 9, 12]


def test_solver_finds_d17_tuple():
    solutions = solve_params(17, 8, 16)
    assert any(s.key == (8, 1, 10, 1, 0, 4) for s in solutions)
    assert [s.key for s in solutions] == sorted(s.key for s in solutions)
    assert all(s.violations() == [] for s in solutions)
    assert all(s.nabla != 0 for s in solutions)


def test_solver_cap_and_b_filter():
    capped = solve_params(17, 8, 16, cap=5)
    assert len(capped) == 5
    assert [s.key for s in capped] == [s.key for s in solve_params(17, 8, 16)[:5]]
    only_b = solve_params(17, 8, 16, b=8)
    assert {s.b for s in only_b} == {8}


def test_solver_rejects_bad_requests():
    with pytest.raises(NoSolutionError):
        solve_params(17, 8, 16, b=0)
    with pytest.raises(NoSolutionError):
        solve_params(17, 8, 3)


def test_zero_nabla_is_a_violation(d17_params):
    bad = dataclasses.replace(d17_params, a=0, c=0, nabla=0)
    assert "nabla" in bad.violations()
    with pytest.raises(CertificationError):
        build_action(bad)


def test_build_action_reproduces_printed_generators(d17_params):
    action = build_action(d17_params)
    assert action.x.cycle_string() == D17_X
    assert action.y.cycle_string() == D17_Y
    assert (action.x.order(), action.y.order(), action.xy.order()) == (2, 8, 9)
    assert (action.eta_x, action.eta_y) == (2, 2)
    assert check_januarial(action).xy_orbit_sizes == (9, 9)


def test_every_solution_certifies():
    for s in solve_params(17, 8, 16, b=8)[:40]:
        y = s.y_map()
        xy = s.x_map().then(y)
        assert y.det_value() == 1 and y.trace_value() == s.b
        assert xy.trace_value() == s.r and xy.det_value() == s.nabla
        action = build_action(s)
        assert action.k == 8 and action.ell == 9
        assert check_januarial(action).is_januarial


@pytest.mark.parametrize("p,k", [(5, 3), (7, 3), (11, 5), (13, 7)])
def test_small_cells_give_januarials(p, k):
    ell = (p + 1) // 2
    for theta in _ints(primitive_roots(ell, p)):
        try:
            solutions = solve_params(p, k, theta, cap=10)
        except NoSolutionError:
            continue
        for s in solutions:
            action = build_action(s)
            assert action.ell == ell
            assert check_januarial(action).xy_orbit_sizes == (ell, ell)


def test_p5_k3_has_solutions():
    # c = 0, e = 4 solves the constraints for theta = 1, b = 1
    keys = {s.key for s in solve_params(5, 3, 1, b=1)}
    assert (1, 1, 0, 2, 4, 1) in keys


def test_hecke_params_as_dict(d17_params):
    assert d17_params.as_dict() == {"a": 1, "b": 8, "c": 10, "d": 1, "e": 0, "f": 4, "nabla": 1, "r": 4}
    assert isinstance(d17_params, HeckeParams)


def test_xy_fixed_points():
    assert not xy_has_fixed_points(17, 4, 1)
    assert not xy_has_fixed_points(3, 0, 1)
    assert xy_has_fixed_points(3, 0, 2)
    assert xy_has_fixed_points(5, 2, 1)  # parabolic


def test_hyperbolic_xy_does_not_certify():
    # valid constraints, but XY = [[2,0],[-1,-2]] fixes two points of PL(F_3)
    params = HeckeParams(p=3, k=3, ell=2, theta=0, a=1, b=1, c=0, d=0, e=2, f=1, nabla=2, r=0)
    assert params.violations() == []
    assert xy_has_fixed_points(3, params.r, params.nabla)
    with pytest.raises(CertificationError):
        build_action(params)


def test_p3_has_no_k3_januarials():
    # b^2 = 4 = 1 mod 3, so scalar Y must be ruled out by f = 0 and 2e = b alone
    assert valid_b_values(3, 3) == [1, 2]
    with pytest.raises(NoSolutionError):
        solve_params(3, 3, 0)


@pytest.mark.parametrize("p,k", [(3, 3), (5, 3), (5, 5), (7, 4), (11, 3)])
def test_solutions_never_have_scalar_y(p, k):
    ell = (p + 1) // 2
    for theta in _ints(primitive_roots(ell, p)):
        try:
            solutions = solve_params(p, k, theta)
        except NoSolutionError:
            continue
        for s in solutions:
            assert not (s.f == 0 and (2 * s.e - s.b) % p == 0), s.key
            assert not xy_has_fixed_points(p, s.r, s.nabla), s.key
            assert build_action(s).y.order() == k
